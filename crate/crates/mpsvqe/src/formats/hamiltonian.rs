//! Line-oriented Hamiltonian integral files.
//!
//! ```text
//! # free comment
//! # hf_energy = -1.1166843870853405e+00
//! n_spatial_orbitals 2
//! n_electrons 2
//! e_core 7.1375399368761816e-01
//! g_storage unique            (optional; default full)
//! h p q value                 (row-major, all p, q)
//! g p q r s value             (chemists' (pq|rs))
//! ```
//!
//! Indices are base 0 over spatial orbitals. Values are written `%.16e`.
//! With `g_storage full` every `(p,q,r,s)` may appear and absent entries are
//! zero. With `g_storage unique` only `q ≤ p`, `s ≤ r`, `rs ≤ pq` (pair
//! index `p(p+1)/2 + q`) may appear and the other seven partners are
//! implied. The writer emits every entry of the stored set in index order,
//! so a file in that form reads and writes back byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use mpsvqe_core::pauli::Integrals;

use super::{format_float, parse_float, parse_index};
use crate::{Error, Result};

/// Which two-electron records a file lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GStorage {
    #[default]
    Full,
    Unique,
}

/// Parsed Hamiltonian file.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFile {
    /// Comment lines without the leading `#`, in file order.
    pub comments: Vec<String>,
    pub n_electrons: usize,
    pub storage: GStorage,
    pub integrals: Integrals,
}

fn pair(p: usize, q: usize) -> usize {
    p * (p + 1) / 2 + q
}

fn is_unique(p: usize, q: usize, r: usize, s: usize) -> bool {
    q <= p && s <= r && pair(r, s) <= pair(p, q)
}

impl HamiltonianFile {
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

    pub fn n_orbitals(&self) -> usize {
        self.integrals.n_orbitals()
    }

    /// Value of a `# key = value` comment.
    pub fn metadata(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
    }

    pub fn metadata_f64(&self, key: &str) -> Option<f64> {
        self.metadata(key)?.parse().ok()
    }

    /// Hartree-Fock occupation over interleaved spin orbitals, e.g. `1100`.
    pub fn hf_bitstring(&self) -> String {
        let n = 2 * self.n_orbitals();
        (0..n).map(|i| if i < self.n_electrons { '1' } else { '0' }).collect()
    }
}

/// Accumulates the orbital count, core energy, storage mode and `h`/`g`
/// records shared by Hamiltonian and fragment files.
pub(crate) struct IntegralRecords {
    count_key: &'static str,
    n: Option<usize>,
    e_core: Option<f64>,
    storage: GStorage,
    h: Vec<Option<f64>>,
    g: Vec<f64>,
    g_seen: Vec<bool>,
}

impl IntegralRecords {
    pub(crate) fn new(count_key: &'static str) -> Self {
        Self { count_key, n: None, e_core: None, storage: GStorage::Full, h: Vec::new(), g: Vec::new(), g_seen: Vec::new() }
    }

    pub(crate) fn n(&self) -> Option<usize> {
        self.n
    }

    pub(crate) fn storage(&self) -> GStorage {
        self.storage
    }

    pub(crate) fn started(&self) -> bool {
        !self.h.is_empty()
    }

    /// Consumes the record if its key is one of ours.
    pub(crate) fn accept(&mut self, tokens: &[&str], line: usize) -> Result<bool> {
        let key = tokens[0];
        let arity = |k: usize| -> Result<()> {
            if tokens.len() != k + 1 {
                return Err(Error::parse(line, format!("{key} takes {k} fields, got {}", tokens.len() - 1)));
            }
            Ok(())
        };
        if key == self.count_key || key == "e_core" || key == "g_storage" {
            arity(1)?;
            if self.started() {
                return Err(Error::parse(line, format!("{key} after integral records")));
            }
            let dup = || Error::parse(line, format!("{key} given twice"));
            if key == self.count_key {
                let n: usize = tokens[1].parse().map_err(|_| Error::parse(line, "invalid orbital count"))?;
                if self.n.replace(n).is_some() {
                    return Err(dup());
                }
            } else if key == "e_core" {
                if self.e_core.replace(parse_float(tokens[1], line)?).is_some() {
                    return Err(dup());
                }
            } else {
                self.storage = match tokens[1] {
                    "full" => GStorage::Full,
                    "unique" => GStorage::Unique,
                    other => return Err(Error::parse(line, format!("unknown g_storage {other:?}"))),
                }
            }
            return Ok(true);
        }
        if key != "h" && key != "g" {
            return Ok(false);
        }
        let n = self.n.ok_or_else(|| Error::parse(line, format!("integral record before {}", self.count_key)))?;
        if self.h.is_empty() {
            self.h = vec![None; n * n];
            self.g = vec![0.0; n * n * n * n];
            self.g_seen = vec![false; n * n * n * n];
        }
        if key == "h" {
            arity(3)?;
            let p = parse_index(tokens[1], n, line)?;
            let q = parse_index(tokens[2], n, line)?;
            if self.h[p * n + q].replace(parse_float(tokens[3], line)?).is_some() {
                return Err(Error::parse(line, format!("duplicate record h {p} {q}")));
            }
            return Ok(true);
        }
        arity(5)?;
        let mut idx = [0usize; 4];
        for (k, slot) in idx.iter_mut().enumerate() {
            *slot = parse_index(tokens[k + 1], n, line)?;
        }
        let [p, q, r, s] = idx;
        let v = parse_float(tokens[5], line)?;
        let at = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
        if self.g_seen[at(p, q, r, s)] {
            return Err(Error::parse(line, format!("duplicate record g {p} {q} {r} {s}")));
        }
        match self.storage {
            GStorage::Full => {
                self.g[at(p, q, r, s)] = v;
                self.g_seen[at(p, q, r, s)] = true;
            }
            GStorage::Unique => {
                if !is_unique(p, q, r, s) {
                    return Err(Error::parse(line, format!("g {p} {q} {r} {s} is not a unique-storage index")));
                }
                for (a, b, c, d) in
                    [(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r), (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)]
                {
                    self.g[at(a, b, c, d)] = v;
                    self.g_seen[at(a, b, c, d)] = true;
                }
            }
        }
        Ok(true)
    }

    pub(crate) fn finish(self) -> Result<Integrals> {
        let n = self.n.ok_or_else(|| Error::Format(format!("missing {}", self.count_key)))?;
        let e_core = self.e_core.ok_or_else(|| Error::Format("missing e_core".into()))?;
        let (h, g) = if self.h.is_empty() {
            (vec![0.0; n * n], vec![0.0; n * n * n * n])
        } else {
            (self.h.into_iter().map(|v| v.unwrap_or(0.0)).collect(), self.g)
        };
        Ok(Integrals::new(n, h, g, e_core)?)
    }
}

/// Writes the `count_key`, `e_core`, storage and integral records.
pub(crate) fn write_integrals(
    out: &mut String,
    count_key: &str,
    ints: &Integrals,
    storage: GStorage,
) -> std::fmt::Result {
    let n = ints.n_orbitals();
    writeln!(out, "{count_key} {n}")?;
    writeln!(out, "e_core {}", format_float(ints.e_core()))?;
    if storage == GStorage::Unique {
        writeln!(out, "g_storage unique")?;
    }
    for p in 0..n {
        for q in 0..n {
            writeln!(out, "h {p} {q} {}", format_float(ints.h(p, q)))?;
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if storage == GStorage::Unique && !is_unique(p, q, r, s) {
                        continue;
                    }
                    writeln!(out, "g {p} {q} {r} {s} {}", format_float(ints.g(p, q, r, s)))?;
                }
            }
        }
    }
    Ok(())
}

impl std::str::FromStr for HamiltonianFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut n_elec: Option<usize> = None;
        let mut records = IntegralRecords::new("n_spatial_orbitals");
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if let Some(c) = raw.strip_prefix('#') {
                comments.push(c.to_string());
                continue;
            }
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            let Some(&key) = tokens.first() else { continue };
            if records.accept(&tokens, line)? {
                continue;
            }
            if key != "n_electrons" {
                return Err(Error::parse(line, format!("unknown record {key:?}")));
            }
            if tokens.len() != 2 {
                return Err(Error::parse(line, format!("n_electrons takes 1 fields, got {}", tokens.len() - 1)));
            }
            if records.started() {
                return Err(Error::parse(line, "n_electrons after integral records"));
            }
            let n: usize = tokens[1].parse().map_err(|_| Error::parse(line, "invalid electron count"))?;
            if n_elec.replace(n).is_some() {
                return Err(Error::parse(line, "n_electrons given twice"));
            }
        }
        let storage = records.storage();
        let n_orb = records.n();
        let integrals = records.finish()?;
        let n = n_orb.expect("finish checked the count");
        let n_electrons = n_elec.ok_or_else(|| Error::Format("missing n_electrons".into()))?;
        if n_electrons > 2 * n {
            return Err(Error::Format(format!("{n_electrons} electrons exceed {} spin orbitals", 2 * n)));
        }
        Ok(Self { comments, n_electrons, storage, integrals })
    }
}

impl std::fmt::Display for HamiltonianFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "#{c}")?;
        }
        // n_electrons sits between the orbital count and e_core.
        let mut body = String::new();
        write_integrals(&mut body, "n_spatial_orbitals", &self.integrals, self.storage)?;
        let (first, rest) = body.split_once('\n').expect("count line");
        writeln!(out, "{first}")?;
        writeln!(out, "n_electrons {}", self.n_electrons)?;
        out.push_str(rest);
        f.write_str(&out)
    }
}
