//! Line-oriented text format for decomposition problems.
//!
//! One declaration per line; `#` starts a comment unless it appears inside a
//! quoted constant; blank lines are skipped.  A file declares a schema, a
//! constraint-language mode, and any number of constraints:
//!
//! ```text
//! schema Emp(x:3, y:2)
//! mode utvpi
//! cdc: x2 = "ICT" -> y1 + y2 <= 5
//! cdc: top -> y1 - y2 >= 0
//! view V1: !(x2 = "ICT") & x3 = "Manager"
//! view V2: top & y2 < 4
//! uind: R[x1] <= R[x2]
//! fd: {1, 2} -> {4}
//! domain: x1 in {"a", "b"}
//! ```
//!
//! Selection conditions combine equality atoms `x<i> = <const>` and
//! `x<i> != <const>` with `&`, `|`, `!` and parentheses; `top` is the empty
//! condition.  Comparisons relate at most two unit-coefficient interpreted
//! terms to an integer bound with `<=`, `>=`, `<`, `>` or `=`.  In `utvpi`
//! mode consequents and view conditions must stay conjunctive; `butvpi`
//! additionally allows `&`, `|` and `!` over comparisons.  A view body may be
//! a selection condition, a comparison part, a conjunction of one of each, or
//! a disjunction of one of each (which splits the view in two).  Constants
//! are bare identifiers or double-quoted strings; the `⋆` prefix is reserved
//! for generated placeholder constants.

use std::collections::BTreeSet;
use std::fmt;

use crate::cformula::{
    desugar_domain_constraint, normalize_comparison, split_conjunctive_cdc, split_disjunctive_view,
    Butvpi, CFormula, Cmp, Mode, Utvpi,
};
use crate::model::{BoolExpr, Cdc, DomConstant, EqAtom, Fd, Problem, Schema, Uind, ViewDef};

/// Parse failure with the 1-based source line; line 0 marks file-level
/// problems (missing declarations, cross-line validation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses a problem file.  `mode_override` takes precedence over any `mode`
/// line, and permits files that omit one.
pub fn parse_problem(text: &str, mode_override: Option<Mode>) -> Result<Problem, ParseError> {
    let mut schema: Option<Schema> = None;
    let mut file_mode: Option<Mode> = None;
    let mut cdcs: Vec<Cdc> = Vec::new();
    let mut views: Vec<ViewDef> = Vec::new();
    let mut uinds: Vec<Uind> = Vec::new();
    let mut fds: Vec<Fd> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let fail = |message: String| ParseError { line, message };
        let stripped = strip_comment(raw).trim();
        if stripped.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(tokenize(stripped).map_err(fail)?);
        let keyword = match cur.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            other => {
                return Err(fail(format!(
                    "expected a declaration keyword, found {}",
                    describe(other)
                )))
            }
        };
        cur.bump();
        let need_schema = |schema: &Option<Schema>| -> Result<Schema, String> {
            schema
                .clone()
                .ok_or_else(|| format!("`{keyword}` declaration before the schema line"))
        };
        let need_mode = |file_mode: Option<Mode>| -> Result<Mode, String> {
            mode_override
                .or(file_mode)
                .ok_or_else(|| "no mode in effect; add a `mode` line first or pass one".to_string())
        };
        match keyword.as_str() {
            "schema" => {
                if schema.is_some() {
                    return Err(fail("duplicate schema declaration".to_string()));
                }
                schema = Some(parse_schema(&mut cur).map_err(fail)?);
            }
            "mode" => {
                if file_mode.is_some() {
                    return Err(fail("duplicate mode declaration".to_string()));
                }
                file_mode = Some(parse_mode(&mut cur).map_err(fail)?);
            }
            "cdc" => {
                let sc = need_schema(&schema).map_err(fail)?;
                let mode = need_mode(file_mode).map_err(fail)?;
                cur.expect_sym(":").map_err(fail)?;
                let cdc = parse_cdc(&mut cur, &sc, mode).map_err(fail)?;
                cdcs.extend(split_conjunctive_cdc(&cdc));
            }
            "view" => {
                let sc = need_schema(&schema).map_err(fail)?;
                let mode = need_mode(file_mode).map_err(fail)?;
                let name = cur.expect_ident().map_err(fail)?;
                cur.expect_sym(":").map_err(fail)?;
                let body = parse_or(&mut cur, &sc).map_err(fail)?;
                cur.expect_end().map_err(fail)?;
                views.extend(build_views(name, body, mode).map_err(fail)?);
            }
            "uind" => {
                let sc = need_schema(&schema).map_err(fail)?;
                cur.expect_sym(":").map_err(fail)?;
                uinds.push(parse_uind(&mut cur, &sc).map_err(fail)?);
            }
            "fd" => {
                let sc = need_schema(&schema).map_err(fail)?;
                cur.expect_sym(":").map_err(fail)?;
                let lhs = parse_position_set(&mut cur, &sc).map_err(fail)?;
                cur.expect_sym("->").map_err(fail)?;
                let rhs = parse_position_set(&mut cur, &sc).map_err(fail)?;
                cur.expect_end().map_err(fail)?;
                fds.push(Fd { lhs, rhs });
            }
            "domain" => {
                let sc = need_schema(&schema).map_err(fail)?;
                let mode = need_mode(file_mode).map_err(fail)?;
                cur.expect_sym(":").map_err(fail)?;
                let pair = parse_domain(&mut cur, &sc).map_err(fail)?;
                for cdc in [pair.0, pair.1] {
                    cdcs.push(Cdc {
                        antecedent: cdc.antecedent,
                        consequent: coerce_mode(cdc.consequent, mode),
                    });
                }
            }
            other => {
                return Err(fail(format!("unrecognized declaration `{other}`")));
            }
        }
    }

    let schema = schema.ok_or(ParseError {
        line: 0,
        message: "missing schema declaration".to_string(),
    })?;
    let mode = mode_override.or(file_mode).ok_or(ParseError {
        line: 0,
        message: "missing mode declaration and no override given".to_string(),
    })?;
    let mut problem = Problem::new(schema, mode);
    problem.cdcs = cdcs;
    problem.views = views;
    problem.uinds = uinds;
    problem.fds = fds;
    problem.validate().map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(problem)
}

/// Cuts the line at the first `#` that is not inside a quoted constant.
fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Sym(&'static str),
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of line".to_string(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Str(s)) => format!("\"{s}\""),
        Some(Tok::Int(n)) => format!("`{n}`"),
        Some(Tok::Sym(s)) => format!("`{s}`"),
    }
}

fn tokenize(line: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end] != '"' {
                end += 1;
            }
            if end == chars.len() {
                return Err("unterminated quoted constant".to_string());
            }
            toks.push(Tok::Str(chars[start..end].iter().collect()));
            i = end + 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| format!("integer `{text}` out of range"))?;
            toks.push(Tok::Int(n));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        let two = if i + 1 < chars.len() {
            match (c, chars[i + 1]) {
                ('-', '>') => Some("->"),
                ('!', '=') => Some("!="),
                ('<', '=') => Some("<="),
                ('>', '=') => Some(">="),
                _ => None,
            }
        } else {
            None
        };
        if let Some(sym) = two {
            toks.push(Tok::Sym(sym));
            i += 2;
            continue;
        }
        let one = match c {
            '(' => "(",
            ')' => ")",
            '{' => "{",
            '}' => "}",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            ':' => ":",
            '*' => "*",
            '+' => "+",
            '-' => "-",
            '=' => "=",
            '<' => "<",
            '>' => ">",
            '!' => "!",
            '&' => "&",
            '|' => "|",
            _ => return Err(format!("unexpected character {c:?}")),
        };
        toks.push(Tok::Sym(one));
        i += 1;
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<Tok>,
    at: usize,
}

impl Cursor {
    fn new(toks: Vec<Tok>) -> Cursor {
        Cursor { toks, at: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        match self.peek() {
            Some(Tok::Sym(t)) if *t == s => {
                self.at += 1;
                true
            }
            _ => false,
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), String> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn expect_ident(&mut self) -> Result<String, String> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(format!(
                "expected an identifier, found {}",
                describe(other.as_ref())
            )),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), String> {
        let s = self.expect_ident()?;
        if s == word {
            Ok(())
        } else {
            Err(format!("expected `{word}`, found `{s}`"))
        }
    }

    fn expect_int(&mut self) -> Result<i64, String> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            other => Err(format!(
                "expected an integer, found {}",
                describe(other.as_ref())
            )),
        }
    }

    fn expect_end(&self) -> Result<(), String> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            Err(format!(
                "trailing input after declaration: {}",
                describe(self.peek())
            ))
        }
    }
}

/// Splits `x3` / `y12` into its column kind and 1-based index.
fn position_ref(ident: &str) -> Option<(char, usize)> {
    let mut chars = ident.chars();
    let kind = chars.next()?;
    if kind != 'x' && kind != 'y' {
        return None;
    }
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|n| (kind, n))
}

fn resolve_x(ident: &str, schema: &Schema) -> Option<Result<usize, String>> {
    match position_ref(ident) {
        Some(('x', i)) => Some(if i >= 1 && i <= schema.x_arity {
            Ok(i)
        } else {
            Err(format!(
                "position x{i} out of range for {} non-interpreted columns",
                schema.x_arity
            ))
        }),
        _ => None,
    }
}

fn resolve_y(ident: &str, schema: &Schema) -> Result<usize, String> {
    match position_ref(ident) {
        Some(('y', v)) if v >= 1 && v <= schema.y_arity => Ok(v),
        Some(('y', v)) => Err(format!(
            "position y{v} out of range for {} interpreted columns",
            schema.y_arity
        )),
        _ => Err(format!(
            "expected an interpreted position like `y1`, found `{ident}`"
        )),
    }
}

fn parse_constant(cur: &mut Cursor) -> Result<DomConstant, String> {
    let s = match cur.bump() {
        Some(Tok::Str(s)) => s,
        Some(Tok::Ident(s)) => {
            if position_ref(&s).is_some() {
                return Err(format!(
                    "`{s}` reads as a position name; quote it to use it as a constant"
                ));
            }
            if s == "top" {
                return Err("`top` is a keyword; quote it to use it as a constant".to_string());
            }
            s
        }
        other => {
            return Err(format!(
                "expected a constant (bare or quoted), found {}",
                describe(other.as_ref())
            ))
        }
    };
    if s.is_empty() {
        return Err("empty constant".to_string());
    }
    if s.starts_with('⋆') {
        return Err("the `⋆` prefix is reserved for generated placeholder constants".to_string());
    }
    Ok(DomConstant::new(s))
}

/// Parsed condition before it is separated into selection and comparison
/// parts.  A `Y` leaf carries every atom produced by one comparison (`=`
/// rewrites to two).
enum Node {
    True,
    X(EqAtom),
    Y(Vec<Utvpi>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    X,
    Y,
    Mixed,
}

fn kind_of(node: &Node) -> Kind {
    match node {
        Node::True | Node::X(_) => Kind::X,
        Node::Y(_) => Kind::Y,
        Node::Not(inner) => kind_of(inner),
        Node::And(parts) | Node::Or(parts) => {
            let mut kind = None;
            for p in parts {
                let k = kind_of(p);
                kind = Some(match kind {
                    None => k,
                    Some(prev) if prev == k => k,
                    Some(_) => return Kind::Mixed,
                });
            }
            kind.unwrap_or(Kind::X)
        }
    }
}

fn and_of(mut parts: Vec<Node>) -> Node {
    if parts.len() == 1 {
        parts.pop().expect("nonempty")
    } else {
        Node::And(parts)
    }
}

fn or_of(mut parts: Vec<Node>) -> Node {
    if parts.len() == 1 {
        parts.pop().expect("nonempty")
    } else {
        Node::Or(parts)
    }
}

fn parse_or(cur: &mut Cursor, schema: &Schema) -> Result<Node, String> {
    let mut parts = vec![parse_and(cur, schema)?];
    while cur.eat_sym("|") {
        parts.push(parse_and(cur, schema)?);
    }
    Ok(or_of(parts))
}

fn parse_and(cur: &mut Cursor, schema: &Schema) -> Result<Node, String> {
    let mut parts = vec![parse_unary(cur, schema)?];
    while cur.eat_sym("&") {
        parts.push(parse_unary(cur, schema)?);
    }
    Ok(and_of(parts))
}

fn parse_unary(cur: &mut Cursor, schema: &Schema) -> Result<Node, String> {
    if cur.eat_sym("!") {
        return Ok(Node::Not(Box::new(parse_unary(cur, schema)?)));
    }
    if cur.eat_sym("(") {
        let node = parse_or(cur, schema)?;
        cur.expect_sym(")")?;
        return Ok(node);
    }
    parse_leaf(cur, schema)
}

fn parse_leaf(cur: &mut Cursor, schema: &Schema) -> Result<Node, String> {
    let head = cur.peek().cloned();
    if let Some(Tok::Ident(s)) = head {
        if s == "top" {
            cur.bump();
            return Ok(Node::True);
        }
        if let Some(position) = resolve_x(&s, schema) {
            cur.bump();
            let position = position?;
            let negated = if cur.eat_sym("!=") {
                true
            } else {
                cur.expect_sym("=")?;
                false
            };
            let constant = parse_constant(cur)?;
            return Ok(Node::X(EqAtom {
                position,
                constant,
                negated,
            }));
        }
    }
    parse_comparison(cur, schema).map(Node::Y)
}

fn parse_comparison(cur: &mut Cursor, schema: &Schema) -> Result<Vec<Utvpi>, String> {
    let mut vars: Vec<(i64, usize)> = Vec::new();
    let mut constant: i64 = 0;
    let mut sign: i64 = if cur.eat_sym("-") { -1 } else { 1 };
    loop {
        match cur.bump() {
            Some(Tok::Int(n)) => {
                if cur.eat_sym("*") {
                    let ident = cur.expect_ident()?;
                    let v = resolve_y(&ident, schema)?;
                    vars.push((sign * n, v));
                } else {
                    constant = constant
                        .checked_add(sign * n)
                        .ok_or_else(|| "constant term overflows".to_string())?;
                }
            }
            Some(Tok::Ident(s)) => match position_ref(&s) {
                Some(('x', _)) => {
                    return Err(format!(
                        "`{s}` names a non-interpreted position; comparisons range over \
                         interpreted positions only"
                    ))
                }
                _ => {
                    let v = resolve_y(&s, schema)?;
                    vars.push((sign, v));
                }
            },
            other => {
                return Err(format!(
                    "expected a comparison term, found {}",
                    describe(other.as_ref())
                ))
            }
        }
        sign = if cur.eat_sym("+") {
            1
        } else if cur.eat_sym("-") {
            -1
        } else {
            break;
        };
    }
    let op = match cur.bump() {
        Some(Tok::Sym("<=")) => Cmp::Le,
        Some(Tok::Sym(">=")) => Cmp::Ge,
        Some(Tok::Sym("<")) => Cmp::Lt,
        Some(Tok::Sym(">")) => Cmp::Gt,
        Some(Tok::Sym("=")) => Cmp::Eq,
        other => {
            return Err(format!(
                "expected a comparison operator, found {}",
                describe(other.as_ref())
            ))
        }
    };
    let negative = cur.eat_sym("-");
    let bound = cur.expect_int()?;
    let bound = if negative { -bound } else { bound };
    let d = bound
        .checked_sub(constant)
        .ok_or_else(|| "bound overflows after folding constant terms".to_string())?;
    let (a, i, b, j) = match vars.as_slice() {
        [] => (0, None, 0, None),
        [(a, i)] => (*a, Some(*i), 0, None),
        [(a, i), (b, j)] => (*a, Some(*i), *b, Some(*j)),
        _ => return Err("a comparison may mention at most two interpreted terms".to_string()),
    };
    normalize_comparison(op, a, i, b, j, d).map_err(|e| e.to_string())
}

fn node_to_boolexpr(node: Node) -> Result<BoolExpr, String> {
    match node {
        Node::True => Ok(BoolExpr::True),
        Node::X(atom) => Ok(BoolExpr::Atom(atom)),
        Node::Y(_) => {
            Err("comparisons are not allowed in a selection condition".to_string())
        }
        Node::Not(inner) => Ok(BoolExpr::not(node_to_boolexpr(*inner)?)),
        Node::And(parts) => Ok(BoolExpr::and(
            parts
                .into_iter()
                .map(node_to_boolexpr)
                .collect::<Result<_, _>>()?,
        )),
        Node::Or(parts) => Ok(BoolExpr::or(
            parts
                .into_iter()
                .map(node_to_boolexpr)
                .collect::<Result<_, _>>()?,
        )),
    }
}

fn node_to_cformula(node: Node, mode: Mode) -> Result<CFormula, String> {
    match mode {
        Mode::Utvpi => {
            let mut atoms = Vec::new();
            collect_conjunctive_atoms(node, &mut atoms)?;
            Ok(CFormula::Utvpi(atoms))
        }
        Mode::Butvpi => Ok(CFormula::Butvpi(node_to_butvpi(node)?)),
    }
}

fn collect_conjunctive_atoms(node: Node, out: &mut Vec<Utvpi>) -> Result<(), String> {
    match node {
        Node::Y(atoms) => {
            out.extend(atoms);
            Ok(())
        }
        Node::And(parts) => {
            for p in parts {
                collect_conjunctive_atoms(p, out)?;
            }
            Ok(())
        }
        Node::Or(_) => Err("disjunction over comparisons needs mode butvpi".to_string()),
        Node::Not(_) => Err("negation over comparisons needs mode butvpi".to_string()),
        Node::True | Node::X(_) => {
            Err("equality atoms are not allowed among comparisons".to_string())
        }
    }
}

fn node_to_butvpi(node: Node) -> Result<Butvpi, String> {
    match node {
        Node::Y(atoms) => Ok(Butvpi::and(atoms.into_iter().map(Butvpi::Atom).collect())),
        Node::Not(inner) => Ok(Butvpi::not(node_to_butvpi(*inner)?)),
        Node::And(parts) => Ok(Butvpi::and(
            parts
                .into_iter()
                .map(node_to_butvpi)
                .collect::<Result<_, _>>()?,
        )),
        Node::Or(parts) => Ok(Butvpi::or(
            parts
                .into_iter()
                .map(node_to_butvpi)
                .collect::<Result<_, _>>()?,
        )),
        Node::True | Node::X(_) => {
            Err("equality atoms are not allowed among comparisons".to_string())
        }
    }
}

/// Rewrites conjunctive formulas into the boolean fragment so that desugared
/// constraints match a butvpi-mode problem.
fn coerce_mode(c: CFormula, mode: Mode) -> CFormula {
    match (mode, c) {
        (Mode::Butvpi, CFormula::Utvpi(atoms)) => {
            CFormula::Butvpi(Butvpi::and(atoms.into_iter().map(Butvpi::Atom).collect()))
        }
        (_, c) => c,
    }
}

fn parse_schema(cur: &mut Cursor) -> Result<Schema, String> {
    let name = cur.expect_ident()?;
    cur.expect_sym("(")?;
    cur.expect_keyword("x")?;
    cur.expect_sym(":")?;
    let k = arity(cur.expect_int()?)?;
    cur.expect_sym(",")?;
    cur.expect_keyword("y")?;
    cur.expect_sym(":")?;
    let m = arity(cur.expect_int()?)?;
    cur.expect_sym(")")?;
    cur.expect_end()?;
    Schema::new(name, k, m).map_err(|e| e.to_string())
}

fn arity(n: i64) -> Result<usize, String> {
    usize::try_from(n).map_err(|_| format!("arity {n} out of range"))
}

fn parse_mode(cur: &mut Cursor) -> Result<Mode, String> {
    let word = cur.expect_ident()?;
    cur.expect_end()?;
    match word.as_str() {
        "utvpi" => Ok(Mode::Utvpi),
        "butvpi" => Ok(Mode::Butvpi),
        other => Err(format!("unknown mode `{other}` (expected `utvpi` or `butvpi`)")),
    }
}

fn parse_cdc(cur: &mut Cursor, schema: &Schema, mode: Mode) -> Result<Cdc, String> {
    let antecedent = parse_or(cur, schema)?;
    cur.expect_sym("->")?;
    let consequent = parse_or(cur, schema)?;
    cur.expect_end()?;
    Ok(Cdc {
        antecedent: node_to_boolexpr(antecedent)?,
        consequent: node_to_cformula(consequent, mode)?,
    })
}

/// Separates a view body into its selection and comparison parts.  A
/// disjunction with parts of both kinds splits into a pure-selection view and
/// a comparison-only view, which together keep the same tuples.
fn build_views(name: String, body: Node, mode: Mode) -> Result<Vec<ViewDef>, String> {
    let (disjunctive, parts) = match body {
        Node::Or(parts) => (true, parts),
        Node::And(parts) => (false, parts),
        single => (false, vec![single]),
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in parts {
        match kind_of(&p) {
            Kind::X => xs.push(p),
            Kind::Y => ys.push(p),
            Kind::Mixed => {
                return Err(format!(
                    "view {name}: a {} may not mix equality atoms and comparisons",
                    if disjunctive { "disjunct" } else { "conjunct" }
                ))
            }
        }
    }
    if disjunctive && !xs.is_empty() && !ys.is_empty() {
        let x = node_to_boolexpr(or_of(xs))?;
        let y = node_to_cformula(or_of(ys), mode)?;
        let (vx, vy) = split_disjunctive_view(&name, x, y);
        return Ok(vec![vx, vy]);
    }
    let rebuild = if disjunctive { or_of } else { and_of };
    let x_condition = if xs.is_empty() {
        BoolExpr::True
    } else {
        node_to_boolexpr(rebuild(xs))?
    };
    let y_condition = if ys.is_empty() {
        None
    } else {
        Some(node_to_cformula(rebuild(ys), mode)?)
    };
    Ok(vec![ViewDef {
        name,
        x_condition,
        y_condition,
    }])
}

fn parse_uind(cur: &mut Cursor, schema: &Schema) -> Result<Uind, String> {
    let (rel1, kind1, lhs) = parse_uind_side(cur, schema)?;
    cur.expect_sym("<=")?;
    let (rel2, kind2, rhs) = parse_uind_side(cur, schema)?;
    cur.expect_end()?;
    if rel1 != rel2 {
        return Err(format!(
            "inclusion relates two relation names `{rel1}` and `{rel2}`; \
             unary inclusions stay within one relation"
        ));
    }
    if kind1 != kind2 {
        return Err(
            "both sides of a unary inclusion must be non-interpreted or both interpreted"
                .to_string(),
        );
    }
    Ok(Uind { lhs, rhs })
}

fn parse_uind_side(cur: &mut Cursor, schema: &Schema) -> Result<(String, char, usize), String> {
    let rel = cur.expect_ident()?;
    cur.expect_sym("[")?;
    let ident = cur.expect_ident()?;
    let (kind, global) = match resolve_x(&ident, schema) {
        Some(position) => ('x', position?),
        None => ('y', schema.x_arity + resolve_y(&ident, schema)?),
    };
    cur.expect_sym("]")?;
    Ok((rel, kind, global))
}

fn parse_position_set(cur: &mut Cursor, schema: &Schema) -> Result<BTreeSet<usize>, String> {
    cur.expect_sym("{")?;
    let mut set = BTreeSet::new();
    loop {
        let n = cur.expect_int()?;
        let arity = schema.arity();
        if n < 1 || n as usize > arity {
            return Err(format!("position {n} out of range 1..={arity}"));
        }
        set.insert(n as usize);
        if cur.eat_sym(",") {
            continue;
        }
        cur.expect_sym("}")?;
        break;
    }
    Ok(set)
}

fn parse_domain(cur: &mut Cursor, schema: &Schema) -> Result<(Cdc, Cdc), String> {
    let ident = cur.expect_ident()?;
    let position = match resolve_x(&ident, schema) {
        Some(position) => position?,
        None => {
            return Err(format!(
                "domain constraints apply to non-interpreted positions, found `{ident}`"
            ))
        }
    };
    cur.expect_keyword("in")?;
    cur.expect_sym("{")?;
    let mut constants = BTreeSet::new();
    loop {
        constants.insert(parse_constant(cur)?);
        if cur.eat_sym(",") {
            continue;
        }
        cur.expect_sym("}")?;
        break;
    }
    cur.expect_end()?;
    desugar_domain_constraint(position, &constants, schema).map_err(|e| e.to_string())
}
