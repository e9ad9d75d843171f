//! Locating bundled Hamiltonian fixtures.

use std::path::PathBuf;

use crate::formats::hamiltonian::HamiltonianFile;
use crate::Result;

/// Environment variable overriding the fixture directory.
pub const FIXTURE_ENV: &str = "MPSVQE_FIXTURES";

/// `$MPSVQE_FIXTURES` if set, else the `fixtures/` directory of this crate.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURE_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

/// File name of the STO-3G hydrogen chain with `n_atoms` atoms.
pub fn chain_fixture_name(n_atoms: usize) -> String {
    format!("hchain_{n_atoms:02}_sto3g.ham")
}

/// File name of the H₂/STO-3G fixture at bond length `r` Å.
pub fn h2_fixture_name(r: f64) -> String {
    format!("h2_sto3g_{r:.4}.ham")
}

pub fn load(name: &str) -> Result<HamiltonianFile> {
    HamiltonianFile::read(fixture_path(name))
}

pub fn load_chain(n_atoms: usize) -> Result<HamiltonianFile> {
    load(&chain_fixture_name(n_atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(chain_fixture_name(8), "hchain_08_sto3g.ham");
        assert_eq!(chain_fixture_name(24), "hchain_24_sto3g.ham");
        assert_eq!(h2_fixture_name(0.7414), "h2_sto3g_0.7414.ham");
        assert_eq!(h2_fixture_name(2.4), "h2_sto3g_2.4000.ham");
    }

    #[test]
    fn bundled_chains_load() {
        for atoms in [2, 4, 6] {
            let f = load_chain(atoms).unwrap();
            assert_eq!(f.n_orbitals(), atoms);
            assert_eq!(f.n_electrons, atoms);
        }
        assert!(load_chain(3).is_err());
    }
}
