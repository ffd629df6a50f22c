import numpy as np

from smoothlearn import catalog
from smoothlearn.dynamics import run_ogd
from smoothlearn.games import NormalFormGame
from smoothlearn.report import save_scan_figure, save_trajectory_figures


def test_trajectory_figures_square_game(tmp_path):
    g = catalog.mp()
    traj = run_ogd(g, eta=0.05, steps=40)
    files = save_trajectory_figures(g, traj, tmp_path)
    names = {f.split("/")[-1] for f in files}
    assert names == {"welfare_trace.png", "negap_trace.png", "diagonal_mass.png"}
    for f in files:
        assert (tmp_path / f.split("/")[-1]).stat().st_size > 0


def test_trajectory_figures_skip_diagonal_when_not_square(tmp_path):
    g = NormalFormGame([np.zeros((2, 3)), np.zeros((2, 3))])
    traj = run_ogd(g, eta=0.05, steps=10)
    files = save_trajectory_figures(g, traj, tmp_path)
    names = {f.split("/")[-1] for f in files}
    assert names == {"welfare_trace.png", "negap_trace.png"}


def test_trajectory_figures_empty_run(tmp_path):
    g = catalog.mp()
    traj = run_ogd(g, eta=0.05, steps=0)
    assert save_trajectory_figures(g, traj, tmp_path) == []


def test_scan_figure(tmp_path):
    rows = [
        {"seed": 1, "opt": 1.5, "rpoa": 0.3, "poa_worst": 0.6, "poa_best": 0.9},
        {"seed": 2, "opt": 1.2, "rpoa": 0.5, "poa_worst": 0.7, "poa_best": 1.0},
    ]
    path = tmp_path / "scan.png"
    assert save_scan_figure(rows, path) == str(path)
    assert path.stat().st_size > 0
