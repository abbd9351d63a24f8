"""Matplotlib figure rendering for the report stage.

Figures are rendered headlessly (Agg) straight to files next to the
delimited outputs; nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .floquet import HarmonicSpectrum
from .modulation import ModulationProfile
from .qubits import QubitArray, Trajectory


def plot_spectrum(spectrum: HarmonicSpectrum, path: str | Path, title: str = "") -> Path:
    """Stem plot of normalized reflected and transmitted power per harmonic."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    n = spectrum.n
    width = 0.38
    ax.bar(n - width / 2, spectrum.power_r, width, label="reflected")
    ax.bar(n + width / 2, spectrum.power_t, width, label="transmitted")
    ax.set_xlabel("harmonic index n")
    ax.set_ylabel("normalized power")
    ax.set_yscale("log")
    floor = 1e-8
    ax.set_ylim(bottom=floor)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_trajectory(
    trajectory: Trajectory, array: QubitArray, path: str | Path, title: str = ""
) -> Path:
    """Per-qubit excitation populations against time."""
    path = Path(path)
    pops = trajectory.populations(array)
    fig, ax = plt.subplots(figsize=(7, 4))
    for q in range(array.count):
        ax.plot(trajectory.times * 1e9, pops[:, q], label=f"Q{q + 1}")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("excitation probability")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(ncol=2, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_waveform(profile: ModulationProfile, path: str | Path, title: str = "") -> Path:
    """One period of the normalized modulation waveform."""
    path = Path(path)
    xi = np.linspace(0.0, 2.0 * np.pi, 513)
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(xi, profile.waveform(xi))
    ax.set_xlabel(r"modulation phase $\xi$ (rad)")
    ax.set_ylabel("m($\\xi$)")
    ax.set_xlim(0.0, 2.0 * np.pi)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
