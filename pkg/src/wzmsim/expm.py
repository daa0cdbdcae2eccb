"""Dense matrix exponential by scaling and squaring with a [13/13] Pade approximant."""

import numpy as np

# Higham (2005): backward error of the [13/13] approximant stays below unit
# roundoff for ||A||_1 <= THETA_13.
THETA_13 = 5.371920351148152

_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)


def expm(A):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {A.shape}")
    A = A.astype(np.result_type(A.dtype, np.float64))
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0.0:
        return np.eye(n, dtype=A.dtype)

    s = max(0, int(np.ceil(np.log2(norm / THETA_13))))
    A = A / 2.0 ** s

    b = _PADE13
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    R = np.linalg.solve(V - U, V + U)

    for _ in range(s):
        R = R @ R
    return R
