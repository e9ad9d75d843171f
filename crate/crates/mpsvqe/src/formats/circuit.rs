//! Gate-list dump of a compiled circuit, one gate per line:
//!
//! ```text
//! n_qubits 4
//! ry 0 1.5707963267948966e+00
//! cnot 1 2
//! fused2 2 m00re m00im ... m33re m33im
//! ```
//!
//! Named gates carry their angle; fused and custom gates carry the full
//! row-major matrix as real/imaginary pairs. Sites are the gate's lowest
//! qubit. `cnot` and `cnot_r` are CNOTs with the control on the left and
//! right site.

use std::fmt::Write as _;

use mpsvqe_core::mps::{Circuit, Gate, GateLabel};

use super::format_float;

fn matrix_fields(m: &[mpsvqe_core::Complex64]) -> String {
    m.iter().map(|z| format!(" {} {}", format_float(z.re), format_float(z.im))).collect()
}

pub fn dump(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "n_qubits {}", circuit.n_qubits()).unwrap();
    for g in circuit.gates() {
        let (site, two, m): (usize, bool, &[_]) = match g {
            Gate::One { site, matrix, .. } => (*site, false, matrix),
            Gate::Two { site, matrix, .. } => (*site, true, matrix),
        };
        let line = match g.label() {
            GateLabel::H => format!("h {site}"),
            GateLabel::X => format!("x {site}"),
            GateLabel::Rx(t) => format!("rx {site} {}", format_float(t)),
            GateLabel::Ry(t) => format!("ry {site} {}", format_float(t)),
            GateLabel::Rz(t) => format!("rz {site} {}", format_float(t)),
            GateLabel::Cnot { control_left: true } => format!("cnot {site} {}", site + 1),
            GateLabel::Cnot { control_left: false } => format!("cnot_r {site} {}", site + 1),
            GateLabel::Swap => format!("swap {site} {}", site + 1),
            GateLabel::Fused | GateLabel::Custom => {
                let kind = if g.label() == GateLabel::Fused { "fused" } else { "custom" };
                format!("{kind}{} {site}{}", if two { 2 } else { 1 }, matrix_fields(m))
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    out
}
