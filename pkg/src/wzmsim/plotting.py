"""
Matplotlib figures written next to the CSV output.

SVG output is made reproducible by pinning the hash salt and dropping the
creation date, so two runs of one config give byte-identical files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# 800 x 600 SVG user units (matplotlib writes SVG in points).
FIGSIZE = (800 / 72, 600 / 72)

_RC = {
    "svg.hashsalt": "wzmsim",
    "svg.fonttype": "path",
    "path.simplify": False,
    "font.size": 14,
    "axes.linewidth": 1.2,
    "lines.linewidth": 2.0,
    "legend.frameon": False,
}


def curve_id(nbar1):
    return f"g1-nbar-{nbar1:g}"


def _save(fig, path):
    fmt = "svg" if str(path).endswith(".svg") else None
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, format=fmt, metadata=metadata)
    plt.close(fig)


def plot_coherence_curves(curves, path):
    """
    One line per nbar1 of g1 against t; ``curves`` maps nbar1 -> (t, g1).

    Each line carries the SVG id ``g1-nbar-<nbar1>``.
    """
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.plot([0, 1], [0, 1], color="0.75", linestyle=":", linewidth=1.0)
        for nbar1, (t, g1) in curves.items():
            (line,) = ax.plot(t, g1, label=rf"$\bar n_1 = {nbar1:g}$")
            line.set_gid(curve_id(nbar1))
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel("transmission amplitude $t$")
        ax.set_ylabel(r"$g^{(1)}(1,2)$")
        ax.legend(loc="lower right")
        fig.tight_layout()
        _save(fig, path)


def plot_fringe(result, g1, path):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.plot(result.phi, result.I_plus, label=r"$I_+$", gid="I_plus")
        ax.plot(result.phi, result.I_minus, label=r"$I_-$", gid="I_minus")
        ax.set_xlim(result.phi[0], result.phi[-1])
        ax.set_ylim(bottom=0)
        ax.set_xlabel(r"path phase $\varphi$ (rad)")
        ax.set_ylabel("mean photon number")
        ax.set_title(f"V = {result.visibility:.4f}, g1 = {g1:.4f}")
        ax.legend(loc="upper right")
        fig.tight_layout()
        _save(fig, path)
