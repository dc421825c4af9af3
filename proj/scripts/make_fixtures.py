#!/usr/bin/env python3
"""Regenerate the reconstructed fixtures in data/.

The measured film spectra are not tabulated anywhere, so these files are
synthesised from the two-level permittivity model of the 70 nm film
(planar dipole distribution) through the same forward models the library
uses, with small seeded noise. They stand in for measurements; they are not
measurements.
"""

import pathlib

import numpy as np

DEBYE = 3.33564095198152e-30
EPS0 = 8.8541878128e-12
HBAR = 1.054571817e-34
E_CHARGE = 1.602176634e-19
HC_EV_NM = 1239.8419843320026

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def eps_two_level(energy, density=1.47e25, dipole=48.0, transition=2.11, decay=1.15e12, dephasing=0.017,
                  background=1.52**2):
    gamma = HBAR * decay / 2.0 / E_CHARGE + dephasing
    strength = density * (dipole * DEBYE) ** 2 / EPS0 / E_CHARGE
    return background + strength / ((transition - energy) - 1j * gamma)


def eps_lorentz(energy, background=2.3104, f0=0.05, w0=2.11, damping=0.1):
    return background + f0 * w0**2 / (w0**2 - energy**2 - 1j * energy * damping)


def index(eps):
    n = np.sqrt(eps.astype(complex))
    return np.where(n.imag < 0, -n, n)


def film_rt(nt, thickness, wavelength, n0=1.0, ns=1.52):
    r1 = (n0 - nt) / (n0 + nt)
    r2 = (nt - ns) / (nt + ns)
    prop = np.exp(2j * np.pi * nt * thickness / wavelength)
    denom = 1.0 + r1 * r2 * prop**2
    r = (r1 + r2 * prop**2) / denom
    t = 4.0 * n0 * nt / ((n0 + nt) * (nt + ns)) * prop / denom
    return np.abs(r) ** 2, ns / n0 * np.abs(t) ** 2


def write(name, header_lines, columns, rows):
    path = OUT / name
    with path.open("w") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
    print("wrote", path)


def main():
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(1729)

    energies = np.round(np.arange(1.9, 2.4 + 1e-9, 0.005), 6)
    eps = eps_two_level(energies)
    noisy = eps + rng.normal(0.0, 0.02, eps.shape) + 1j * rng.normal(0.0, 0.02, eps.shape)
    noisy = noisy.real + 1j * np.maximum(noisy.imag, 1e-3)
    write("epsilon_film_reconstructed.csv",
          ["RECONSTRUCTED, not measured: two-level permittivity of the 70 nm film",
           "(N = 1.47e25 m^-3, d = 48 D, 2.11 eV, gamma = 1.15e12 s^-1, 17 meV dephasing, eps_b = 1.52^2)",
           "plus Gaussian noise sigma = 0.02 per component, seed 1729"],
          ["energy_eV", "eps_re", "eps_im"], zip(energies, noisy.real, noisy.imag))

    e_rt = np.round(np.arange(1.9, 2.35 + 1e-9, 0.01), 6)[::-1]
    lam = HC_EV_NM / e_rt
    R, T = film_rt(index(eps_two_level(e_rt)), 70e-9, lam * 1e-9)
    R = np.clip(R + rng.normal(0.0, 1e-3, R.shape), 0.0, 1.0)
    T = np.clip(T + rng.normal(0.0, 1e-3, T.shape), 0.0, 1.0)
    write("rt_film_reconstructed.csv",
          ["RECONSTRUCTED, not measured: normal-incidence R/T of a 70 nm film of the two-level",
           "permittivity above on a semi-infinite n = 1.52 substrate, noise sigma = 1e-3, seed 1729"],
          ["wavelength_nm", "R", "T"], zip(lam, R, T))

    e_s = np.round(np.linspace(1.9, 2.35, 31), 6)[::-1]
    lam_s = HC_EV_NM / e_s
    Rs, Ts = film_rt(index(eps_lorentz(e_s)), 70e-9, lam_s * 1e-9)
    write("rt_synthetic_smooth.csv",
          ["SYNTHETIC, noiseless: 70 nm film with a weak Lorentz index",
           "(eps_b = 2.3104, f0 = 0.05, 2.11 eV, 0.1 eV damping) on n = 1.52"],
          ["wavelength_nm", "R", "T"], zip(lam_s, Rs, Ts))


if __name__ == "__main__":
    main()
