import numpy as np

from valmod import planted_walk, matrix_profile, valmod_run
from valmod import io as vio
from valmod.report import (
    plot_matrix_profile,
    plot_motif_overlay,
    plot_series,
    plot_valmap,
    render_run_dir,
)


def test_individual_plots(tmp_path):
    s, offs = planted_walk(900, 40, seed=2)
    mp = matrix_profile(s, 40)
    assert plot_series(s, str(tmp_path / "s.png"), highlights=[(offs[0], 40)])
    assert plot_matrix_profile(s, mp.mp, 40, str(tmp_path / "mp.png"))
    res = valmod_run(s, 36, 44, k=1, p=8)
    vm = res.valmap
    assert plot_valmap(s, vm.mpn, vm.lp, [c.offset for c in vm.checkpoints],
                       str(tmp_path / "vm.png"))
    assert plot_motif_overlay(s, list(offs), 40, str(tmp_path / "ov.png"))
    for name in ("s.png", "mp.png", "vm.png", "ov.png"):
        assert (tmp_path / name).stat().st_size > 1000


def test_render_run_dir_from_files(tmp_path):
    s, _ = planted_walk(900, 40, seed=2)
    res = valmod_run(s, 36, 44, k=2, p=8)
    vio.write_topk(res.results, str(tmp_path / "topk.csv"))
    vio.write_valmap(res.valmap, str(tmp_path / "valmap.csv"))
    vio.write_checkpoints(res.valmap.checkpoints, str(tmp_path / "checkpoints.csv"))
    written = render_run_dir(str(tmp_path), s)
    names = {w.rsplit("/", 1)[-1] for w in written}
    assert names == {"valmap.png", "top_motif.png"}
