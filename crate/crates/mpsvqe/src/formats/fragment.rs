//! DMET fragment files.
//!
//! ```text
//! # comments
//! fragment_id a
//! spin_mode spatial              (or spin-orbital)
//! fragment_orbitals 0 1
//! bath_orbitals 2 3              (may list nothing)
//! embedding_electrons 2
//! electron_target 2.0000000000000000e+00
//! n_orbitals 4
//! e_core 0.0000000000000000e+00
//! g_storage unique               (optional)
//! h p q value
//! g p q r s value
//! gamma_env
//! <n_orbitals rows of n_orbitals values>
//! ```
//!
//! Integral records follow the Hamiltonian format, over all `n_orbitals`
//! orbitals in the declared spin basis. Files read back byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mpsvqe_core::dmet::{FragmentSpec, SpinMode};

use super::hamiltonian::{write_integrals, GStorage, IntegralRecords};
use super::{format_float, parse_float};
use crate::{Error, Result};

/// File extension of fragment files in a fragment directory.
pub const FRAGMENT_EXTENSION: &str = "frag";

#[derive(Debug, Clone, PartialEq)]
pub struct FragmentFile {
    pub comments: Vec<String>,
    pub storage: GStorage,
    pub spec: FragmentSpec,
}

impl FragmentFile {
    pub fn new(spec: FragmentSpec) -> Self {
        Self { comments: Vec::new(), storage: GStorage::Full, spec }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse().map_err(|e| match e {
            Error::Parse { line, message } => Error::Format(format!("{}:{line}: {message}", path.display())),
            other => Error::Format(format!("{}: {other}", path.display())),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }
}

/// Every `*.frag` file in `dir`, sorted by file name.
pub fn read_fragment_dir(dir: impl AsRef<Path>) -> Result<Vec<(PathBuf, FragmentFile)>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == FRAGMENT_EXTENSION))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Format(format!("{}: no .{FRAGMENT_EXTENSION} files", dir.display())));
    }
    paths
        .into_iter()
        .map(|p| FragmentFile::read(&p).map(|f| (p, f)))
        .collect()
}

fn parse_indices(tokens: &[&str], line: usize) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| t.parse().map_err(|_| Error::parse(line, format!("invalid orbital index {t:?}"))))
        .collect()
}

impl std::str::FromStr for FragmentFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut id = None;
        let mut spin = None;
        let mut fragment = None;
        let mut bath = None;
        let mut electrons = None;
        let mut target = None;
        let mut records = IntegralRecords::new("n_orbitals");
        let mut gamma: Option<Vec<f64>> = None;
        let mut gamma_rows = 0;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if let Some(c) = raw.strip_prefix('#') {
                comments.push(c.to_string());
                continue;
            }
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            let Some(&key) = tokens.first() else { continue };
            if let Some(g) = gamma.as_mut() {
                let n = records.n().expect("gamma_env requires n_orbitals");
                if gamma_rows == n {
                    return Err(Error::parse(line, "content after the gamma_env block"));
                }
                if tokens.len() != n {
                    return Err(Error::parse(line, format!("gamma_env row has {} values, expected {n}", tokens.len())));
                }
                for t in &tokens {
                    g.push(parse_float(t, line)?);
                }
                gamma_rows += 1;
                continue;
            }
            if records.accept(&tokens, line)? {
                continue;
            }
            let one = || -> Result<&str> {
                match tokens.len() {
                    2 => Ok(tokens[1]),
                    k => Err(Error::parse(line, format!("{key} takes 1 field, got {}", k - 1))),
                }
            };
            let dup = || Error::parse(line, format!("{key} given twice"));
            match key {
                "fragment_id" => {
                    if id.replace(one()?.to_string()).is_some() {
                        return Err(dup());
                    }
                }
                "spin_mode" => {
                    let v = one()?;
                    let mode = SpinMode::from_name(v).ok_or_else(|| Error::parse(line, format!("unknown spin mode {v:?}")))?;
                    if spin.replace(mode).is_some() {
                        return Err(dup());
                    }
                }
                "fragment_orbitals" => {
                    if fragment.replace(parse_indices(&tokens[1..], line)?).is_some() {
                        return Err(dup());
                    }
                }
                "bath_orbitals" => {
                    if bath.replace(parse_indices(&tokens[1..], line)?).is_some() {
                        return Err(dup());
                    }
                }
                "embedding_electrons" => {
                    let n: usize = one()?.parse().map_err(|_| Error::parse(line, "invalid electron count"))?;
                    if electrons.replace(n).is_some() {
                        return Err(dup());
                    }
                }
                "electron_target" => {
                    if target.replace(parse_float(one()?, line)?).is_some() {
                        return Err(dup());
                    }
                }
                "gamma_env" => {
                    if tokens.len() != 1 {
                        return Err(Error::parse(line, "gamma_env takes no fields"));
                    }
                    let n = records.n().ok_or_else(|| Error::parse(line, "gamma_env before n_orbitals"))?;
                    gamma = Some(Vec::with_capacity(n * n));
                }
                other => return Err(Error::parse(line, format!("unknown record {other:?}"))),
            }
        }

        let missing = |k: &str| Error::Format(format!("missing {k}"));
        let storage = records.storage();
        let n = records.n();
        let integrals = records.finish()?;
        let gamma = gamma.ok_or_else(|| missing("gamma_env"))?;
        if Some(gamma_rows) != n {
            return Err(Error::Format(format!("gamma_env has {gamma_rows} rows, expected {}", n.unwrap_or(0))));
        }
        let spec = FragmentSpec::new(
            id.ok_or_else(|| missing("fragment_id"))?,
            spin.ok_or_else(|| missing("spin_mode"))?,
            fragment.ok_or_else(|| missing("fragment_orbitals"))?,
            bath.ok_or_else(|| missing("bath_orbitals"))?,
            integrals,
            gamma,
            electrons.ok_or_else(|| missing("embedding_electrons"))?,
            target.ok_or_else(|| missing("electron_target"))?,
        )?;
        Ok(Self { comments, storage, spec })
    }
}

impl std::fmt::Display for FragmentFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = &self.spec;
        let list = |v: &[usize]| v.iter().map(|i| format!(" {i}")).collect::<String>();
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "#{c}")?;
        }
        writeln!(out, "fragment_id {}", s.id)?;
        writeln!(out, "spin_mode {}", s.spin.name())?;
        writeln!(out, "fragment_orbitals{}", list(&s.fragment))?;
        writeln!(out, "bath_orbitals{}", list(&s.bath))?;
        writeln!(out, "embedding_electrons {}", s.embedding_electrons)?;
        writeln!(out, "electron_target {}", format_float(s.electron_target))?;
        write_integrals(&mut out, "n_orbitals", &s.integrals, self.storage)?;
        writeln!(out, "gamma_env")?;
        let n = s.n_orbitals();
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| format_float(s.gamma(r, c))).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::hamiltonian::HamiltonianFile;

    fn h2_fragment() -> FragmentFile {
        let ham: HamiltonianFile = include_str!("../../fixtures/h2_sto3g_0.7414.ham").parse().unwrap();
        let mut gamma = vec![0.0; 4];
        gamma[3] = 0.5;
        let spec =
            FragmentSpec::new("h2", SpinMode::Spatial, vec![0], vec![1], ham.integrals, gamma, 2, 1.0).unwrap();
        let mut f = FragmentFile::new(spec);
        f.comments.push(" test fragment".into());
        f
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let f = h2_fragment();
        let text = f.to_string();
        let back: FragmentFile = text.parse().unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_string(), text);
        assert!(text.contains("bath_orbitals 1\n"));
        assert!(text.ends_with("0.0000000000000000e+00 5.0000000000000000e-01\n"));
    }

    #[test]
    fn empty_bath_and_spin_orbital_mode() {
        let mut f = h2_fragment();
        f.spec.bath.clear();
        f.spec.spin = SpinMode::SpinOrbital;
        f.spec.gamma_env = vec![0.0; 4];
        f.spec.embedding_electrons = 1;
        let text = f.to_string();
        assert!(text.contains("bath_orbitals\n"));
        let back: FragmentFile = text.parse().unwrap();
        assert_eq!(back.spec.spin, SpinMode::SpinOrbital);
        assert!(back.spec.bath.is_empty());
    }

    #[test]
    fn malformed_files() {
        let good = h2_fragment().to_string();
        let cases = [
            good.replace("spin_mode spatial", "spin_mode both"),
            good.replace("fragment_orbitals 0", "fragment_orbitals x"),
            good.replace("bath_orbitals 1", "bath_orbitals 0"),
            good.replace("gamma_env\n", ""),
            good.replace("0.0000000000000000e+00 5.0000000000000000e-01\n", "0.5\n"),
            good.replace("fragment_id h2\n", ""),
            format!("{good}1 2\n"),
            good.replace("electron_target", "target"),
        ];
        for text in cases {
            assert!(text.parse::<FragmentFile>().is_err(), "{text}");
        }
    }

    #[test]
    fn directory_listing_is_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = h2_fragment();
        for id in ["b", "a"] {
            f.spec.id = id.into();
            f.write(dir.path().join(format!("{id}.frag"))).unwrap();
        }
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let got = read_fragment_dir(dir.path()).unwrap();
        let ids: Vec<&str> = got.iter().map(|(_, f)| f.spec.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        let empty = tempfile::tempdir().unwrap();
        assert!(read_fragment_dir(empty.path()).is_err());
    }
}
