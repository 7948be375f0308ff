//! Line-oriented circuit files.
//!
//! ```text
//! qubits 2
//! layer
//! diag sqrtcz 0 1
//! rx 1
//! layer
//! rails I P I P
//! ```

use crate::error::{parse_err, Result};
use crate::format::{parse_index, strip_comment};
use crate::layout::HorizontalChoice;

use super::{Diagonal, Layer, LogicalCircuit};

pub(super) fn parse_circuit(text: &str) -> Result<LogicalCircuit> {
    let mut circuit: Option<LogicalCircuit> = None;
    // Pending layer, with the line it started on and whether its diagonal
    // was already set.
    let mut open: Option<(Layer, usize, bool)> = None;
    let mut last_line = 0;

    let close =
        |circuit: &mut LogicalCircuit, open: &mut Option<(Layer, usize, bool)>| -> Result<()> {
            if let Some((layer, line, _)) = open.take() {
                circuit
                    .push_layer(layer)
                    .map_err(|e| parse_err(line, e.to_string()))?;
            }
            Ok(())
        };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens[0] == "qubits" {
            if circuit.is_some() {
                return Err(parse_err(line, "duplicate `qubits` header"));
            }
            if tokens.len() != 2 {
                return Err(parse_err(line, "expected `qubits <N>`"));
            }
            let n = parse_index(tokens[1], line)?;
            circuit = Some(LogicalCircuit::new(n).map_err(|e| parse_err(line, e.to_string()))?);
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| parse_err(line, format!("`{}` before `qubits` header", tokens[0])))?;
        let n = c.n_qubits();
        let qubit = |t: &str| -> Result<usize> {
            let q = parse_index(t, line)?;
            if q >= n {
                return Err(parse_err(
                    line,
                    format!("qubit {q} out of range for {n} qubits"),
                ));
            }
            Ok(q)
        };
        match tokens[0] {
            "layer" => {
                if tokens.len() != 1 {
                    return Err(parse_err(line, "`layer` takes no arguments"));
                }
                close(c, &mut open)?;
                open = Some((Layer::default(), line, false));
            }
            "diag" | "rails" => {
                let (layer, _, has_diag) = open
                    .as_mut()
                    .ok_or_else(|| parse_err(line, format!("`{}` outside a layer", tokens[0])))?;
                if *has_diag {
                    return Err(parse_err(
                        line,
                        "conflicting diagonal assignments in one layer",
                    ));
                }
                layer.diagonal = if tokens[0] == "rails" {
                    let choices = tokens[1..]
                        .iter()
                        .map(|t| match *t {
                            "I" => Ok(HorizontalChoice::Identity),
                            "P" => Ok(HorizontalChoice::Phase),
                            other => Err(parse_err(
                                line,
                                format!("expected `I` or `P`, found `{other}`"),
                            )),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if choices.len() != 1 << n {
                        return Err(parse_err(
                            line,
                            format!("expected {} rail entries", 1usize << n),
                        ));
                    }
                    Diagonal::Rails(choices)
                } else {
                    match (tokens.get(1).copied(), tokens.len()) {
                        (Some("none"), 2) => Diagonal::None,
                        (Some("sqrtz"), 3) => Diagonal::SqrtZ(qubit(tokens[2])?),
                        (Some("sqrtzdag"), 3) => Diagonal::SqrtZDag(qubit(tokens[2])?),
                        (Some("sqrtcz"), 4) => {
                            let (p, q) = (qubit(tokens[2])?, qubit(tokens[3])?);
                            if p == q {
                                return Err(parse_err(line, "sqrtcz needs two distinct qubits"));
                            }
                            Diagonal::SqrtCz(p, q)
                        }
                        _ => {
                            return Err(parse_err(
                                line,
                                "expected `diag sqrtz <q> | sqrtzdag <q> | sqrtcz <p> <q> | none`",
                            ))
                        }
                    }
                };
                *has_diag = true;
            }
            "rx" => {
                let (layer, _, _) = open
                    .as_mut()
                    .ok_or_else(|| parse_err(line, "`rx` outside a layer"))?;
                if tokens.len() < 2 {
                    return Err(parse_err(line, "expected `rx <q>...`"));
                }
                for t in &tokens[1..] {
                    let q = qubit(t)?;
                    if layer.rotations.contains(&q) {
                        return Err(parse_err(
                            line,
                            format!("qubit {q} rotated twice in one layer"),
                        ));
                    }
                    layer.rotations.push(q);
                }
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    let mut circuit =
        circuit.ok_or_else(|| parse_err(last_line.max(1), "missing `qubits` header"))?;
    close(&mut circuit, &mut open)?;
    Ok(circuit)
}

pub(super) fn circuit_text(c: &LogicalCircuit) -> String {
    let mut out = format!("qubits {}\n", c.n_qubits());
    for layer in c.layers() {
        out.push_str("layer\n");
        match &layer.diagonal {
            Diagonal::None => out.push_str("diag none\n"),
            Diagonal::SqrtZ(q) => out.push_str(&format!("diag sqrtz {q}\n")),
            Diagonal::SqrtZDag(q) => out.push_str(&format!("diag sqrtzdag {q}\n")),
            Diagonal::SqrtCz(p, q) => out.push_str(&format!("diag sqrtcz {p} {q}\n")),
            Diagonal::Rails(r) => {
                let cells: Vec<&str> = r
                    .iter()
                    .map(|h| match h {
                        HorizontalChoice::Identity => "I",
                        HorizontalChoice::Phase => "P",
                    })
                    .collect();
                out.push_str(&format!("rails {}\n", cells.join(" ")));
            }
        }
        if !layer.rotations.is_empty() {
            let qs: Vec<String> = layer.rotations.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("rx {}\n", qs.join(" ")));
        }
    }
    out
}
