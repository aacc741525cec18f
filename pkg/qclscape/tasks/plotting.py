import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

from qclscape import constants  # noqa: E402

log = logging.getLogger(__name__)

MARKER_GROUP = 'markers'

SVG_PARAMS = {
    'svg.hashsalt': constants.SVG_HASH_SALT,
    'svg.fonttype': 'path',
    'path.simplify': False,
}


def save_svg(fig, path):
    with matplotlib.rc_context(SVG_PARAMS):
        fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    log.info(f"Wrote {path}")


def new_figure(title):
    fig, ax = plt.subplots(figsize=constants.PLOT_SIZE_INCHES)
    if title:
        ax.set_title(title)
    return fig, ax


def scatter_svg(x, y, fidelity, spec):
    """Fidelity-coloured scatter, markers grouped under the `markers` id."""
    with matplotlib.rc_context(SVG_PARAMS):
        fig, ax = new_figure(spec.title)
        markers = ax.scatter(
            np.asarray(x, dtype=float), np.asarray(y, dtype=float), c=np.asarray(fidelity, dtype=float),
            cmap=spec.colormap, vmin=0.0, vmax=1.0, s=(2.0 * spec.marker_radius) ** 2, linewidths=0,
        )
        markers.set_gid(MARKER_GROUP)
        fig.colorbar(markers, ax=ax, label='fidelity')
        ax.set_xlabel(spec.x_column)
        ax.set_ylabel(spec.y_column)
        save_svg(fig, spec.output_path)


def overlap_svg(groups, spec):
    """Circles at overlap representatives, area proportional to the group count."""
    x = [group.x for group in groups]
    y = [group.y for group in groups]
    fidelity = [group.fidelity for group in groups]
    sizes = [constants.PLOT_OVERLAP_SCALE * group.count for group in groups]

    with matplotlib.rc_context(SVG_PARAMS):
        fig, ax = new_figure(spec.title)
        markers = ax.scatter(
            np.asarray(x, dtype=float), np.asarray(y, dtype=float), c=np.asarray(fidelity, dtype=float),
            s=np.asarray(sizes, dtype=float), cmap=spec.colormap, vmin=0.0, vmax=1.0, alpha=0.6,
            edgecolors='black', linewidths=0.3,
        )
        markers.set_gid(MARKER_GROUP)
        fig.colorbar(markers, ax=ax, label='fidelity')
        ax.set_xlabel(spec.x_column)
        ax.set_ylabel(spec.y_column)
        save_svg(fig, spec.output_path)


def histogram_svg(series, edges, path, title=''):
    """Pulse counts per fidelity bin on a log count axis, `series` maps label to counts."""
    centers = 0.5 * (edges[:-1] + edges[1:])
    with matplotlib.rc_context(SVG_PARAMS):
        fig, ax = new_figure(title)
        for label, counts in series.items():
            counts = np.asarray(counts, dtype=float)
            ax.plot(centers, np.where(counts > 0, counts, np.nan), marker='o', drawstyle='steps-mid', label=label)
        peak = max([float(np.max(counts)) for counts in series.values()] + [1.0])
        ax.set_yscale('log')
        ax.set_ylim(0.5, 2.0 * peak)
        ax.set_xlim(0.0, 1.0)
        ax.set_xlabel('fidelity')
        ax.set_ylabel('pulse count')
        if series:
            ax.legend(loc='upper left')
        save_svg(fig, path)
