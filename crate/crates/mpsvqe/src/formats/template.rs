//! Ansatz template text files.
//!
//! ```text
//! # comments
//! n_qubits 4
//! n_params 3
//! -5.0000000000000000e-01 X0Z1Y2 0      (coeff, Pauli string, parameter id)
//! ```
//!
//! Each block is the factor `exp(i·coeff·θ[param]·string)`, applied in file
//! order.

use std::fmt::Write as _;
use std::path::Path;

use mpsvqe_core::ansatz::{AnsatzTemplate, TemplateBlock};
use mpsvqe_core::pauli::PauliString;

use super::{format_float, parse_float};
use crate::{Error, Result};

pub fn to_text(t: &AnsatzTemplate) -> String {
    let mut out = String::new();
    writeln!(out, "n_qubits {}", t.n_qubits()).unwrap();
    writeln!(out, "n_params {}", t.n_params()).unwrap();
    for b in t.blocks() {
        writeln!(out, "{} {} {}", format_float(b.coeff), b.string, b.param).unwrap();
    }
    out
}

pub fn from_text(text: &str) -> Result<AnsatzTemplate> {
    let mut n_qubits = None;
    let mut n_params = None;
    let mut blocks = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() || raw.starts_with('#') {
            continue;
        }
        let count = |slot: &mut Option<usize>| -> Result<()> {
            if tokens.len() != 2 || !blocks.is_empty() {
                return Err(Error::parse(line, format!("misplaced or malformed {}", tokens[0])));
            }
            let v = tokens[1].parse().map_err(|_| Error::parse(line, format!("invalid count {:?}", tokens[1])))?;
            if slot.replace(v).is_some() {
                return Err(Error::parse(line, format!("{} given twice", tokens[0])));
            }
            Ok(())
        };
        match tokens[0] {
            "n_qubits" => count(&mut n_qubits)?,
            "n_params" => count(&mut n_params)?,
            _ => {
                if tokens.len() != 3 {
                    return Err(Error::parse(line, "block needs coeff, Pauli string and parameter id"));
                }
                let coeff = parse_float(tokens[0], line)?;
                let string: PauliString = tokens[1].parse().map_err(|e| Error::parse(line, format!("{e}")))?;
                let param = tokens[2]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("invalid parameter id {:?}", tokens[2])))?;
                blocks.push(TemplateBlock { string, param, coeff });
            }
        }
    }
    let n_qubits = n_qubits.ok_or_else(|| Error::Format("missing n_qubits".into()))?;
    let n_params = n_params.ok_or_else(|| Error::Format("missing n_params".into()))?;
    Ok(AnsatzTemplate::new(n_qubits, n_params, blocks)?)
}

pub fn write(path: impl AsRef<Path>, t: &AnsatzTemplate) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_text(t)).map_err(|e| Error::io(path, e))
}

pub fn read(path: impl AsRef<Path>) -> Result<AnsatzTemplate> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
