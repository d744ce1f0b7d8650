"""Regenerate the FCIDUMP fixtures (STO-3G, canonical HF orbitals).

Requires PySCF. Writes fixtures/<molecule>/<geometry-tag>.fcidump and
prints the reference HF and FCI total energies for each system.
"""
import os
import numpy as np
from pyscf import gto, scf, fci, ao2mo

HERE = os.path.dirname(os.path.abspath(__file__))
TOL = 1e-12


def write_fcidump(path, mf, nelec, ms2):
    mo = mf.mo_coeff
    norb = mo.shape[1]
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.kernel(mf.mol, mo), norb)
    ecore = mf.mol.energy_nuc()
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(f" &FCI NORB={norb},NELEC={nelec},MS2={ms2},\n")
        f.write("  ORBSYM=" + ",".join(["1"] * norb) + ",\n")
        f.write("  ISYM=1,\n &END\n")
        for i in range(norb):
            for j in range(i + 1):
                for k in range(norb):
                    for l in range(k + 1):
                        if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                            continue
                        v = eri[i, j, k, l]
                        if abs(v) > TOL:
                            f.write(f"{float(v)!r} {i+1} {j+1} {k+1} {l+1}\n")
        for i in range(norb):
            for j in range(i + 1):
                v = h1[i, j]
                if abs(v) > TOL:
                    f.write(f"{float(v)!r} {i+1} {j+1} 0 0\n")
        for i, e in enumerate(mf.mo_energy):
            f.write(f"{float(e)!r} {i+1} 0 0 0\n")
        f.write(f"{float(ecore)!r} 0 0 0 0\n")


def run(name, tag, atom, charge=0, spin=0, unit="Angstrom"):
    mol = gto.M(atom=atom, basis="sto-3g", charge=charge, spin=spin, unit=unit, verbose=0)
    mf = scf.RHF(mol) if spin == 0 else scf.ROHF(mol)
    mf.conv_tol = 1e-12
    ehf = mf.kernel()
    efci = fci.FCI(mf).kernel()[0]
    write_fcidump(os.path.join(HERE, name, f"{tag}.fcidump"), mf, mol.nelectron, spin)
    print(f"{name:5s} {tag:10s} E_HF={ehf:.10f} E_FCI={efci:.10f} corr={efci - ehf:.8f}")


def chain(n, r):
    return [("H", (0.0, 0.0, i * r)) for i in range(n)]


if __name__ == "__main__":
    run("h2", "r0.7414", chain(2, 0.7414))
    run("h3p", "r1.5", chain(3, 1.5), charge=1)
    run("h3p", "r2.0", chain(3, 2.0), charge=1)
    run("h3", "r1.5", chain(3, 1.5), spin=1)
    run("h4", "r1.5", chain(4, 1.5))
    run("lih", "r1.595", [("Li", (0, 0, 0)), ("H", (0, 0, 1.595))])
    run("hf", "r0.917", [("F", (0, 0, 0)), ("H", (0, 0, 0.917))])
    th = np.deg2rad(104.5) / 2
    r = 0.958
    run("h2o", "r0.958", [("O", (0, 0, 0)), ("H", (0, r * np.sin(th), r * np.cos(th))),
                          ("H", (0, -r * np.sin(th), r * np.cos(th)))])
    # C2v insertion path: Be at origin, H at (0, +-(2.54 - 0.46 x), x) bohr
    for x in (0.0, 2.0):
        y = 2.54 - 0.46 * x
        run("beh2", f"x{x:.1f}", [("Be", (0, 0, 0)), ("H", (0, y, x)), ("H", (0, -y, x))], unit="Bohr")
