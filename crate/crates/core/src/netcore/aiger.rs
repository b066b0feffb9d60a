//! Combinational AIGER reader and writer (`aag` and `aig`).
//!
//! Node layout produced by the reader: PIs in file order, then `CONST0` when
//! literal 0 or 1 is referenced, then AND gates in file order, then POs.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use thiserror::Error;

use super::{BooleanNetwork, Fanin, GateKind, Node, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Line(usize),
    Byte(usize),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(l) => write!(f, "line {l}"),
            Position::Byte(b) => write!(f, "byte {b}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum AigerError {
    #[error("{at}: malformed header: {reason}")]
    Header { at: Position, reason: String },
    #[error("{at}: sequential AIGER is not supported ({latches} latches)")]
    Latches { at: Position, latches: usize },
    #[error("{at}: literal {literal} out of range (maximum variable {max_var})")]
    LiteralOutOfRange { at: Position, literal: usize, max_var: usize },
    #[error("{at}: literal {literal} is used but never defined")]
    Undefined { at: Position, literal: usize },
    #[error("{at}: variable {var} defined twice")]
    Redefined { at: Position, var: usize },
    #[error("{at}: cyclic definition through literal {literal}")]
    Cycle { at: Position, literal: usize },
    #[error("{at}: {reason}")]
    Syntax { at: Position, reason: String },
    #[error("unexpected end of file: {0}")]
    Truncated(String),
    #[error("node {node}: {kind} cannot be written as AIGER")]
    Unsupported { node: NodeId, kind: GateKind },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Header {
    max_var: usize,
    inputs: usize,
    outputs: usize,
    ands: usize,
}

struct AndDef {
    lhs: usize,
    rhs: [usize; 2],
    at: Position,
}

struct Raw {
    inputs: Vec<(usize, Position)>,
    outputs: Vec<(usize, Position)>,
    ands: Vec<AndDef>,
    input_names: HashMap<usize, String>,
    output_names: HashMap<usize, String>,
}

/// Reads a combinational AIGER file in either the ASCII or the binary encoding.
pub fn parse_aiger(bytes: &[u8]) -> Result<BooleanNetwork, AigerError> {
    let raw = if bytes.starts_with(b"aag") {
        read_ascii(bytes)?
    } else if bytes.starts_with(b"aig") {
        read_binary(bytes)?
    } else {
        return Err(AigerError::Header {
            at: Position::Line(1),
            reason: "expected `aag` or `aig` magic".into(),
        });
    };
    build(raw)
}

/// Splits off one `\n`-terminated line starting at `pos`.
fn take_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<(usize, &'a str)> {
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    let end = bytes[start..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| start + e);
    *pos = end + 1;
    let text = std::str::from_utf8(&bytes[start..end]).ok()?;
    Some((start, text.trim_end_matches('\r')))
}

fn parse_header(line: &str, expected_magic: &str) -> Result<Header, AigerError> {
    let at = Position::Line(1);
    let mut fields = line.split_ascii_whitespace();
    if fields.next() != Some(expected_magic) {
        return Err(AigerError::Header { at, reason: format!("expected `{expected_magic}`") });
    }
    let nums: Vec<usize> = fields
        .map(|f| f.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| AigerError::Header { at, reason: e.to_string() })?;
    if nums.len() < 5 {
        return Err(AigerError::Header { at, reason: format!("expected M I L O A, found {} fields", nums.len()) });
    }
    let (max_var, inputs, latches, outputs, ands) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if latches > 0 {
        return Err(AigerError::Latches { at, latches });
    }
    if let Some(extra) = nums.get(5..) {
        if extra.iter().any(|&x| x > 0) {
            return Err(AigerError::Header { at, reason: "bad/constraint/justice/fairness sections are not supported".into() });
        }
    }
    if max_var < inputs + ands {
        return Err(AigerError::Header { at, reason: format!("M={max_var} is smaller than I+L+A={}", inputs + ands) });
    }
    Ok(Header { max_var, inputs, outputs, ands })
}

fn numbers(line: &str, count: usize, at: Position) -> Result<Vec<usize>, AigerError> {
    let nums: Vec<usize> = line
        .split_ascii_whitespace()
        .map(|f| f.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| AigerError::Syntax { at, reason: e.to_string() })?;
    if nums.len() != count {
        return Err(AigerError::Syntax { at, reason: format!("expected {count} literals, found {}", nums.len()) });
    }
    Ok(nums)
}

fn check_literal(literal: usize, max_var: usize, at: Position) -> Result<usize, AigerError> {
    if literal / 2 > max_var {
        return Err(AigerError::LiteralOutOfRange { at, literal, max_var });
    }
    Ok(literal)
}

fn read_ascii(bytes: &[u8]) -> Result<Raw, AigerError> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut next = |what: &str| -> Result<(usize, String), AigerError> {
        line_no += 1;
        take_line(bytes, &mut pos)
            .map(|(_, l)| (line_no, l.to_string()))
            .ok_or_else(|| AigerError::Truncated(what.to_string()))
    };
    let (_, header_line) = next("header")?;
    let header = parse_header(&header_line, "aag")?;

    let mut raw = Raw {
        inputs: Vec::with_capacity(header.inputs),
        outputs: Vec::with_capacity(header.outputs),
        ands: Vec::with_capacity(header.ands),
        input_names: HashMap::new(),
        output_names: HashMap::new(),
    };
    for _ in 0..header.inputs {
        let (ln, line) = next("input literal")?;
        let at = Position::Line(ln);
        let lit = check_literal(numbers(&line, 1, at)?[0], header.max_var, at)?;
        if lit < 2 || lit % 2 == 1 {
            return Err(AigerError::Syntax { at, reason: format!("input literal {lit} must be a positive even literal") });
        }
        raw.inputs.push((lit, at));
    }
    for _ in 0..header.outputs {
        let (ln, line) = next("output literal")?;
        let at = Position::Line(ln);
        let lit = check_literal(numbers(&line, 1, at)?[0], header.max_var, at)?;
        raw.outputs.push((lit, at));
    }
    for _ in 0..header.ands {
        let (ln, line) = next("and gate")?;
        let at = Position::Line(ln);
        let v = numbers(&line, 3, at)?;
        for &lit in &v {
            check_literal(lit, header.max_var, at)?;
        }
        if v[0] < 2 || v[0] % 2 == 1 {
            return Err(AigerError::Syntax { at, reason: format!("and gate output {} must be a positive even literal", v[0]) });
        }
        raw.ands.push(AndDef { lhs: v[0], rhs: [v[1], v[2]], at });
    }
    let rest = &bytes[pos..];
    read_symbols(rest, line_no, &mut raw)?;
    Ok(raw)
}

fn read_symbols(rest: &[u8], first_line: usize, raw: &mut Raw) -> Result<(), AigerError> {
    let mut pos = 0;
    let mut line_no = first_line;
    while let Some((_, line)) = take_line(rest, &mut pos) {
        line_no += 1;
        if line == "c" || line.starts_with("c ") {
            break;
        }
        if line.is_empty() {
            continue;
        }
        let at = Position::Line(line_no);
        let (tag, body) = line.split_at(1);
        let (index, name) = body
            .split_once(' ')
            .ok_or_else(|| AigerError::Syntax { at, reason: format!("malformed symbol `{line}`") })?;
        let index: usize = index
            .parse()
            .map_err(|_| AigerError::Syntax { at, reason: format!("malformed symbol `{line}`") })?;
        match tag {
            "i" if index < raw.inputs.len() => {
                raw.input_names.insert(index, name.to_string());
            }
            "o" if index < raw.outputs.len() => {
                raw.output_names.insert(index, name.to_string());
            }
            _ => return Err(AigerError::Syntax { at, reason: format!("unexpected symbol `{line}`") }),
        }
    }
    Ok(())
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Result<usize, AigerError> {
    let start = *pos;
    let mut value = 0usize;
    let mut shift = 0;
    loop {
        let byte = *bytes.get(*pos).ok_or_else(|| AigerError::Truncated("binary and gate".into()))?;
        *pos += 1;
        if shift >= usize::BITS {
            return Err(AigerError::Syntax { at: Position::Byte(start), reason: "delta encoding overflows".into() });
        }
        value |= ((byte & 0x7f) as usize) << shift;
        if byte & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
    }
}

fn read_binary(bytes: &[u8]) -> Result<Raw, AigerError> {
    let mut pos = 0;
    let (_, header_line) =
        take_line(bytes, &mut pos).ok_or_else(|| AigerError::Truncated("header".into()))?;
    let header = parse_header(header_line, "aig")?;
    let mut line_no = 1;

    let mut raw = Raw {
        inputs: (0..header.inputs).map(|i| (2 * (i + 1), Position::Line(1))).collect(),
        outputs: Vec::with_capacity(header.outputs),
        ands: Vec::with_capacity(header.ands),
        input_names: HashMap::new(),
        output_names: HashMap::new(),
    };
    for _ in 0..header.outputs {
        line_no += 1;
        let (_, line) =
            take_line(bytes, &mut pos).ok_or_else(|| AigerError::Truncated("output literal".into()))?;
        let at = Position::Line(line_no);
        let lit = check_literal(numbers(line, 1, at)?[0], header.max_var, at)?;
        raw.outputs.push((lit, at));
    }
    for i in 0..header.ands {
        let at = Position::Byte(pos);
        let lhs = 2 * (header.inputs + i + 1);
        let d0 = read_varint(bytes, &mut pos)?;
        let d1 = read_varint(bytes, &mut pos)?;
        let rhs0 = lhs.checked_sub(d0).filter(|_| d0 > 0).ok_or_else(|| AigerError::Syntax {
            at,
            reason: format!("delta {d0} invalid for gate output {lhs}"),
        })?;
        let rhs1 = rhs0
            .checked_sub(d1)
            .ok_or_else(|| AigerError::Syntax { at, reason: format!("delta {d1} invalid for literal {rhs0}") })?;
        raw.ands.push(AndDef { lhs, rhs: [rhs0, rhs1], at });
    }
    read_symbols(&bytes[pos..], line_no, &mut raw)?;
    Ok(raw)
}

#[derive(Clone, Copy)]
enum VarDef {
    Input(usize),
    And(usize),
}

fn build(raw: Raw) -> Result<BooleanNetwork, AigerError> {
    let mut defs: HashMap<usize, VarDef> = HashMap::new();
    for (i, &(lit, at)) in raw.inputs.iter().enumerate() {
        if defs.insert(lit / 2, VarDef::Input(i)).is_some() {
            return Err(AigerError::Redefined { at, var: lit / 2 });
        }
    }
    for (i, and) in raw.ands.iter().enumerate() {
        if defs.insert(and.lhs / 2, VarDef::And(i)).is_some() {
            return Err(AigerError::Redefined { at: and.at, var: and.lhs / 2 });
        }
    }

    let uses_const = raw.outputs.iter().any(|&(l, _)| l < 2)
        || raw.ands.iter().any(|a| a.rhs.iter().any(|&l| l < 2));
    let const_id = raw.inputs.len();
    let and_base = raw.inputs.len() + usize::from(uses_const);
    let po_base = and_base + raw.ands.len();

    let resolve = |lit: usize, at: Position| -> Result<Fanin, AigerError> {
        let complemented = lit % 2 == 1;
        let node = match lit / 2 {
            0 => const_id,
            var => match defs.get(&var) {
                Some(VarDef::Input(i)) => *i,
                Some(VarDef::And(i)) => and_base + i,
                None => return Err(AigerError::Undefined { at, literal: lit }),
            },
        };
        Ok(Fanin { node, complemented })
    };

    let mut nodes = Vec::with_capacity(po_base + raw.outputs.len());
    for i in 0..raw.inputs.len() {
        nodes.push(Node { kind: GateKind::Pi, fanins: Vec::new(), name: raw.input_names.get(&i).cloned() });
    }
    if uses_const {
        nodes.push(Node { kind: GateKind::Const0, fanins: Vec::new(), name: None });
    }
    for and in &raw.ands {
        let fanins = vec![resolve(and.rhs[0], and.at)?, resolve(and.rhs[1], and.at)?];
        nodes.push(Node { kind: GateKind::And2, fanins, name: None });
    }
    for (i, &(lit, at)) in raw.outputs.iter().enumerate() {
        nodes.push(Node { kind: GateKind::Po, fanins: vec![resolve(lit, at)?], name: raw.output_names.get(&i).cloned() });
    }

    find_and_cycle(&nodes, and_base, &raw.ands)?;

    let pis = (0..raw.inputs.len()).collect();
    let pos = (po_base..po_base + raw.outputs.len()).collect();
    let net = BooleanNetwork::from_parts_unchecked(nodes, pis, pos);
    debug_assert!(net.validate().is_empty());
    Ok(net)
}

/// Iterative three-colour DFS over AND definitions.
fn find_and_cycle(nodes: &[Node], and_base: usize, ands: &[AndDef]) -> Result<(), AigerError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; ands.len()];
    let as_and = |id: NodeId| (id >= and_base && id < and_base + ands.len()).then(|| id - and_base);
    for root in 0..ands.len() {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Open;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let fanins = &nodes[and_base + g].fanins;
            if *next < fanins.len() {
                let f = fanins[*next];
                *next += 1;
                if let Some(child) = as_and(f.node) {
                    match mark[child] {
                        Mark::Open => {
                            return Err(AigerError::Cycle { at: ands[child].at, literal: ands[child].lhs });
                        }
                        Mark::New => {
                            mark[child] = Mark::Open;
                            stack.push((child, 0));
                        }
                        Mark::Done => {}
                    }
                }
            } else {
                mark[g] = Mark::Done;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// AIGER variable numbering for an AIG-shaped network.
struct Numbering {
    literal: Vec<usize>,
    ands: Vec<NodeId>,
}

fn number(net: &BooleanNetwork) -> Result<Numbering, AigerError> {
    let mut literal = vec![usize::MAX; net.len()];
    for (i, &pi) in net.pis().iter().enumerate() {
        literal[pi] = 2 * (i + 1);
    }
    let mut ands = Vec::new();
    for &id in net.topological_order() {
        match net.kind(id) {
            GateKind::Pi | GateKind::Po => {}
            GateKind::Const0 => literal[id] = 0,
            GateKind::And2 => {
                literal[id] = 2 * (net.pis().len() + ands.len() + 1);
                ands.push(id);
            }
            kind => return Err(AigerError::Unsupported { node: id, kind }),
        }
    }
    Ok(Numbering { literal, ands })
}

fn lit_of(numbering: &Numbering, f: &Fanin) -> usize {
    numbering.literal[f.node] + usize::from(f.complemented)
}

fn write_symbols(net: &BooleanNetwork, out: &mut impl Write) -> std::io::Result<()> {
    for (i, &pi) in net.pis().iter().enumerate() {
        if let Some(name) = &net.node(pi).name {
            writeln!(out, "i{i} {name}")?;
        }
    }
    for (i, &po) in net.pos().iter().enumerate() {
        if let Some(name) = &net.node(po).name {
            writeln!(out, "o{i} {name}")?;
        }
    }
    Ok(())
}

/// Writes an AIG-shaped network (PI, PO, CONST0, AND2 only) as ASCII AIGER.
pub fn write_aiger_ascii(net: &BooleanNetwork, out: &mut impl Write) -> Result<(), AigerError> {
    let numbering = number(net)?;
    let (i, a) = (net.pis().len(), numbering.ands.len());
    writeln!(out, "aag {} {} 0 {} {}", i + a, i, net.pos().len(), a)?;
    for &pi in net.pis() {
        writeln!(out, "{}", numbering.literal[pi])?;
    }
    for &po in net.pos() {
        writeln!(out, "{}", lit_of(&numbering, &net.node(po).fanins[0]))?;
    }
    for &g in &numbering.ands {
        let f = &net.node(g).fanins;
        writeln!(out, "{} {} {}", numbering.literal[g], lit_of(&numbering, &f[0]), lit_of(&numbering, &f[1]))?;
    }
    write_symbols(net, out)?;
    Ok(())
}

fn write_varint(out: &mut impl Write, mut x: usize) -> std::io::Result<()> {
    while x & !0x7f != 0 {
        out.write_all(&[(x & 0x7f) as u8 | 0x80])?;
        x >>= 7;
    }
    out.write_all(&[x as u8])
}

/// Writes an AIG-shaped network as binary AIGER. AND operands are emitted larger literal first.
pub fn write_aiger_binary(net: &BooleanNetwork, out: &mut impl Write) -> Result<(), AigerError> {
    let numbering = number(net)?;
    let (i, a) = (net.pis().len(), numbering.ands.len());
    writeln!(out, "aig {} {} 0 {} {}", i + a, i, net.pos().len(), a)?;
    for &po in net.pos() {
        writeln!(out, "{}", lit_of(&numbering, &net.node(po).fanins[0]))?;
    }
    for &g in &numbering.ands {
        let f = &net.node(g).fanins;
        let (x, y) = (lit_of(&numbering, &f[0]), lit_of(&numbering, &f[1]));
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        let lhs = numbering.literal[g];
        write_varint(out, lhs - hi)?;
        write_varint(out, hi - lo)?;
    }
    write_symbols(net, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // SUM = Cin ^ (A ^ B), Cout = AB | Cin(A ^ B), XORs as three ANDs each.
    use crate::circuits::FULL_ADDER_AAG;

    #[test]
    fn full_adder_shape() {
        let net = parse_aiger(FULL_ADDER_AAG.as_bytes()).unwrap();
        assert_eq!(net.pis().len(), 3);
        assert_eq!(net.pos().len(), 2);
        assert_eq!(net.count_kind(GateKind::And2), 8);
        for w in 0..8u64 {
            let bits: Vec<bool> = (0..3).map(|i| (w >> i) & 1 == 1).collect();
            let ones = bits.iter().filter(|&&b| b).count();
            assert_eq!(net.evaluate_values(&bits).unwrap(), vec![ones % 2 == 1, ones >= 2], "w={w}");
        }
        assert_eq!(net.find_name("Cout"), Some(net.pos()[1]));
    }

    #[test]
    fn empty_circuit() {
        let net = parse_aiger(b"aag 0 0 0 0 0\n").unwrap();
        assert!(net.is_empty());
        assert!(net.validate().is_empty());
    }

    #[test]
    fn constant_outputs() {
        let net = parse_aiger(b"aag 0 0 0 2 0\n0\n1\n").unwrap();
        assert_eq!(net.count_kind(GateKind::Const0), 1);
        assert_eq!(net.evaluate_values(&[]).unwrap(), vec![false, true]);
    }

    #[test]
    fn rejects_latches() {
        let err = parse_aiger(b"aag 1 0 1 0 0\n2 3\n").unwrap_err();
        assert!(matches!(err, AigerError::Latches { latches: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_header() {
        assert!(matches!(parse_aiger(b"aag 1 x 0 0 0\n"), Err(AigerError::Header { .. })));
        assert!(matches!(parse_aiger(b"aag 1 1\n"), Err(AigerError::Header { .. })));
        assert!(matches!(parse_aiger(b"hello"), Err(AigerError::Header { .. })));
    }

    #[test]
    fn literal_out_of_range_names_line() {
        let err = parse_aiger(b"aag 1 1 0 1 0\n2\n8\n").unwrap_err();
        assert!(matches!(err, AigerError::LiteralOutOfRange { at: Position::Line(3), literal: 8, .. }), "{err}");
    }

    #[test]
    fn cyclic_and_definitions() {
        let err = parse_aiger(b"aag 3 1 0 1 2\n2\n4\n4 2 6\n6 4 2\n").unwrap_err();
        assert!(matches!(err, AigerError::Cycle { at: Position::Line(_), .. }), "{err}");
    }

    #[test]
    fn undefined_literal() {
        let err = parse_aiger(b"aag 3 1 0 1 1\n2\n4\n4 2 6\n").unwrap_err();
        assert!(matches!(err, AigerError::Undefined { literal: 6, .. }), "{err}");
    }

    #[test]
    fn binary_matches_ascii() {
        let ascii = parse_aiger(FULL_ADDER_AAG.as_bytes()).unwrap();
        let mut bin = Vec::new();
        write_aiger_binary(&ascii, &mut bin).unwrap();
        let back = parse_aiger(&bin).unwrap();
        assert_eq!(back.pis().len(), 3);
        assert_eq!(back.count_kind(GateKind::And2), 8);
        for w in 0..8u64 {
            let bits: Vec<bool> = (0..3).map(|i| (w >> i) & 1 == 1).collect();
            assert_eq!(back.evaluate_values(&bits).unwrap(), ascii.evaluate_values(&bits).unwrap());
        }
        assert_eq!(back.find_name("SUM"), Some(back.pos()[0]));
    }

    #[test]
    fn truncated_binary_reports_error() {
        let err = parse_aiger(b"aig 3 2 0 1 1\n6\n\x02").unwrap_err();
        assert!(matches!(err, AigerError::Truncated(_)), "{err}");
    }

    #[test]
    fn ascii_round_trip_is_identity() {
        let net = parse_aiger(FULL_ADDER_AAG.as_bytes()).unwrap();
        let mut text = Vec::new();
        write_aiger_ascii(&net, &mut text).unwrap();
        let back = parse_aiger(&text).unwrap();
        assert_eq!(back, net);
    }
}
