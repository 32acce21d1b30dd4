//! Line-oriented text format for circuits.
//!
//! ```text
//! # comment
//! qubits 4
//! clbits 1
//! role 0 DATA
//! qpu 0 A
//! h 0
//! macro CU_0 0 1 2 3 dur=1200 @cu0
//! measure 0 -> 0
//! p(-1.5707963267948966) 1 if 0
//! ```
//!
//! Instruction lines read `<opcode> <qubits...> [-> <clbit>] [if <clbits>]
//! [dur=<ns>] [@<tag>]`. Missing `qubits`/`clbits` headers are inferred from
//! the largest index used.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{BlockTag, Circuit, CircuitError, Instruction, OpKind, Opcode, Qpu, Role};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: unknown opcode `{token}`")]
    UnknownOpcode { line: usize, token: String },
    #[error("line {line}: malformed operand `{token}`")]
    MalformedOperand { line: usize, token: String },
    #[error("line {line}: negative duration `{token}`")]
    NegativeDuration { line: usize, token: String },
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: CircuitError,
    },
}

struct Header {
    qubits: Option<usize>,
    clbits: Option<usize>,
    roles: BTreeMap<usize, Role>,
    partition: BTreeMap<usize, Qpu>,
}

pub fn parse_circuit<T: Time>(text: &str) -> Result<Circuit<T>, ParseError> {
    let mut header = Header {
        qubits: None,
        clbits: None,
        roles: BTreeMap::new(),
        partition: BTreeMap::new(),
    };
    let mut body: Vec<(usize, Instruction<T>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if parse_header(&tokens, &mut header, line)? {
            continue;
        }
        body.push((line, parse_instruction(&tokens, line)?));
    }

    let max_qubit = body
        .iter()
        .flat_map(|(_, i)| i.qubits.iter().copied())
        .chain(header.roles.keys().copied())
        .chain(header.partition.keys().copied())
        .max();
    let max_clbit = body
        .iter()
        .flat_map(|(_, i)| i.clbits.iter().chain(&i.condition).copied())
        .max();
    let num_qubits = header.qubits.unwrap_or(max_qubit.map_or(0, |q| q + 1));
    let num_clbits = header.clbits.unwrap_or(max_clbit.map_or(0, |c| c + 1));

    let mut circuit = Circuit::new(num_qubits, num_clbits, header.roles, header.partition)
        .map_err(|source| ParseError::Invalid { line: 0, source })?;
    for (line, inst) in body {
        circuit
            .append(inst)
            .map_err(|source| ParseError::Invalid { line, source })?;
    }
    Ok(circuit)
}

fn parse_header(tokens: &[&str], header: &mut Header, line: usize) -> Result<bool, ParseError> {
    let bad = || ParseError::BadHeader {
        line,
        text: tokens.join(" "),
    };
    let index = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match tokens[0] {
        "qubits" | "clbits" => {
            let [_, n] = tokens else { return Err(bad()) };
            let n = index(n)?;
            if tokens[0] == "qubits" {
                header.qubits = Some(n);
            } else {
                header.clbits = Some(n);
            }
        }
        "role" => {
            let [_, q, r] = tokens else { return Err(bad()) };
            let role = Role::from_name(r).ok_or_else(bad)?;
            header.roles.insert(index(q)?, role);
        }
        "qpu" => {
            let [_, q, p] = tokens else { return Err(bad()) };
            let qpu = match *p {
                "A" => Qpu::A,
                "B" => Qpu::B,
                _ => return Err(bad()),
            };
            header.partition.insert(index(q)?, qpu);
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn parse_angle(token: &str, prefix: &str, line: usize) -> Result<Option<f64>, ParseError> {
    let Some(rest) = token.strip_prefix(prefix) else {
        return Ok(None);
    };
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| ParseError::MalformedOperand {
            line,
            token: token.to_string(),
        })?;
    inner
        .trim()
        .parse::<f64>()
        .map(Some)
        .map_err(|_| ParseError::MalformedOperand {
            line,
            token: token.to_string(),
        })
}

fn parse_instruction<T: Time>(tokens: &[&str], line: usize) -> Result<Instruction<T>, ParseError> {
    let malformed = |t: &str| ParseError::MalformedOperand {
        line,
        token: t.to_string(),
    };
    let head = tokens[0];
    let mut rest = &tokens[1..];
    let opcode = if let Some(theta) = parse_angle(head, "cp(", line)? {
        Opcode::CP(theta)
    } else if let Some(theta) = parse_angle(head, "p(", line)? {
        Opcode::P(theta)
    } else {
        match OpKind::from_mnemonic(head) {
            Some(OpKind::H) => Opcode::H,
            Some(OpKind::X) => Opcode::X,
            Some(OpKind::Y) => Opcode::Y,
            Some(OpKind::Z) => Opcode::Z,
            Some(OpKind::I) => Opcode::I,
            Some(OpKind::CX) => Opcode::CX,
            Some(OpKind::Measure) => Opcode::Measure,
            Some(OpKind::Reset) => Opcode::Reset,
            Some(OpKind::EbitH) => Opcode::EbitH,
            Some(OpKind::EbitCx) => Opcode::EbitCx,
            Some(OpKind::Macro) => {
                let (label, tail) = rest.split_first().ok_or_else(|| malformed(head))?;
                rest = tail;
                Opcode::Macro(label.to_string())
            }
            _ => {
                return Err(ParseError::UnknownOpcode {
                    line,
                    token: head.to_string(),
                })
            }
        }
    };

    let mut inst = Instruction::new(opcode, Vec::new());
    let mut i = 0;
    while i < rest.len() && rest[i].parse::<usize>().is_ok() {
        inst.qubits.push(rest[i].parse().unwrap());
        i += 1;
    }
    while i < rest.len() {
        let tok = rest[i];
        if tok == "->" {
            let c = rest.get(i + 1).ok_or_else(|| malformed(tok))?;
            inst.clbits.push(c.parse().map_err(|_| malformed(c))?);
            i += 2;
        } else if tok == "if" {
            i += 1;
            let mut bits = Vec::new();
            while i < rest.len() && !rest[i].starts_with("dur=") && !rest[i].starts_with('@') {
                for part in rest[i].split(',').filter(|p| !p.is_empty()) {
                    bits.push(part.parse::<usize>().map_err(|_| malformed(rest[i]))?);
                }
                i += 1;
            }
            if bits.is_empty() {
                return Err(malformed(tok));
            }
            inst = inst.when(bits);
        } else if let Some(value) = tok.strip_prefix("dur=") {
            if value.trim_start().starts_with('-') {
                return Err(ParseError::NegativeDuration {
                    line,
                    token: tok.to_string(),
                });
            }
            let d = value.parse::<T>().map_err(|_| malformed(tok))?;
            inst.duration = Some(d);
            i += 1;
        } else if let Some(tag) = tok.strip_prefix('@') {
            inst.tag = Some(tag.parse::<BlockTag>().map_err(|_| malformed(tok))?);
            i += 1;
        } else {
            return Err(malformed(tok));
        }
    }
    Ok(inst)
}

fn opcode_text(op: &Opcode) -> String {
    match op {
        Opcode::P(theta) => format!("p({theta})"),
        Opcode::CP(theta) => format!("cp({theta})"),
        Opcode::Macro(label) => format!("macro {label}"),
        other => other.kind().mnemonic().to_string(),
    }
}

/// Normalized text form: headers first, then one instruction per line.
pub fn serialize_circuit<T: Time>(circuit: &Circuit<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", circuit.num_qubits());
    let _ = writeln!(out, "clbits {}", circuit.num_clbits());
    for (q, role) in circuit.roles() {
        let _ = writeln!(out, "role {q} {}", role.name());
    }
    for (q, qpu) in circuit.partition() {
        let _ = writeln!(out, "qpu {q} {}", qpu.name());
    }
    for inst in circuit.instructions() {
        out.push_str(&opcode_text(&inst.opcode));
        for q in &inst.qubits {
            let _ = write!(out, " {q}");
        }
        for c in &inst.clbits {
            let _ = write!(out, " -> {c}");
        }
        if inst.is_conditioned() {
            let bits: Vec<String> = inst.condition.iter().map(usize::to_string).collect();
            let _ = write!(out, " if {}", bits.join(","));
        }
        if let Some(d) = inst.duration {
            let _ = write!(out, " dur={d}");
        }
        if let Some(tag) = inst.tag {
            let _ = write!(out, " @{tag}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Circuit<i64>, ParseError> {
        parse_circuit(text)
    }

    #[test]
    fn single_gate() {
        let c = parse("h 0").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert_eq!(c.instructions()[0], Instruction::h(0));
    }

    #[test]
    fn macro_with_override() {
        let c = parse("macro CU_0 0 3 4 5 dur=1200").unwrap();
        let inst = &c.instructions()[0];
        assert_eq!(inst.opcode, Opcode::Macro("CU_0".into()));
        assert_eq!(inst.qubits, vec![0, 3, 4, 5]);
        assert_eq!(inst.duration, Some(1200));
        assert_eq!(c.num_qubits(), 6);
    }

    #[test]
    fn arity_error() {
        assert!(matches!(
            parse("cx 0"),
            Err(ParseError::Invalid {
                line: 1,
                source: CircuitError::QubitArity { .. }
            })
        ));
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse("swap 0 1"),
            Err(ParseError::UnknownOpcode { .. })
        ));
        assert!(matches!(
            parse("h 0 dur=-3"),
            Err(ParseError::NegativeDuration { .. })
        ));
        assert!(matches!(
            parse("h 0 banana"),
            Err(ParseError::MalformedOperand { .. })
        ));
        assert!(matches!(
            parse("p(abc) 0"),
            Err(ParseError::MalformedOperand { .. })
        ));
        assert!(matches!(
            parse("measure 0 ->"),
            Err(ParseError::MalformedOperand { .. })
        ));
        assert!(matches!(
            parse("role 0 BOSS"),
            Err(ParseError::BadHeader { .. })
        ));
        assert!(matches!(
            parse("qubits 1\nh 3"),
            Err(ParseError::Invalid { line: 2, .. })
        ));
    }

    #[test]
    fn full_line_syntax() {
        let text = "# demo\nqubits 3\nclbits 2\nrole 2 WORK\nqpu 0 A\n\
                    measure 0 -> 1   # trailing\n\
                    p(-0.7853981633974483) 1 if 1, 0 dur=9 @phase2\n";
        let c = parse(text).unwrap();
        assert_eq!(c.role(2), Some(Role::Work));
        let p = &c.instructions()[1];
        assert_eq!(p.opcode, Opcode::P(-std::f64::consts::FRAC_PI_4));
        assert_eq!(p.condition, vec![0, 1]);
        assert_eq!(p.duration, Some(9));
        assert_eq!(p.tag, Some(BlockTag::Phase(2)));
    }

    #[test]
    fn serialize_is_normalized() {
        let c = parse("  h   0 \n\ncx 0    1\nmeasure 1 -> 0\nx 0 if 0").unwrap();
        let text = serialize_circuit(&c);
        assert_eq!(
            text,
            "qubits 2\nclbits 1\nh 0\ncx 0 1\nmeasure 1 -> 0\nx 0 if 0\n"
        );
        assert_eq!(serialize_circuit(&parse(&text).unwrap()), text);
    }

    #[test]
    fn float_durations_parse() {
        let c: Circuit<f64> = parse_circuit("h 0 dur=2.5").unwrap();
        assert_eq!(c.instructions()[0].duration, Some(2.5));
    }
}
