//! Minimal DIMACS CNF reader for the reduction generators.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing 'p cnf <vars> <clauses>' header")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    BadHeader { line: usize },
    #[error("line {line}: '{token}' is not a literal")]
    BadLiteral { line: usize, token: String },
    #[error("literal {literal} exceeds the declared {num_vars} variables")]
    LiteralOutOfRange { literal: i32, num_vars: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
}

/// A CNF formula: clauses of non-zero literals, variables `1..=num_vars`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

/// Parses DIMACS text: comment lines start with 'c' (or '%'), the header
/// declares the variable count, and clauses are zero-terminated literal
/// runs, free to span lines.  The declared clause count is not enforced.
pub fn parse_dimacs(input: &str) -> Result<Cnf, DimacsError> {
    let mut num_vars: Option<usize> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (n, raw) in input.lines().enumerate() {
        let line = n + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') || text.starts_with('%') {
            continue;
        }
        if text.starts_with('p') {
            let parts: Vec<&str> = text.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", vars, _clauses] => {
                    num_vars =
                        Some(vars.parse().map_err(|_| DimacsError::BadHeader { line })?);
                }
                _ => return Err(DimacsError::BadHeader { line }),
            }
            continue;
        }
        let vars = num_vars.ok_or(DimacsError::MissingHeader)?;
        for token in text.split_whitespace() {
            let literal: i32 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line, token: token.to_string() })?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if literal.unsigned_abs() as usize > vars {
                return Err(DimacsError::LiteralOutOfRange { literal, num_vars: vars });
            }
            current.push(literal);
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    let num_vars = num_vars.ok_or(DimacsError::MissingHeader)?;
    Ok(Cnf { num_vars, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_headers_and_multiline_clauses() {
        let text = "c sample\np cnf 3 2\n1 -2 0\n2\n3 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![2, 3]]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(parse_dimacs("1 0\n"), Err(DimacsError::MissingHeader));
        assert_eq!(parse_dimacs("p cnf x 1\n"), Err(DimacsError::BadHeader { line: 1 }));
        assert_eq!(
            parse_dimacs("p cnf 1 1\n1 a 0\n"),
            Err(DimacsError::BadLiteral { line: 2, token: "a".into() })
        );
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(DimacsError::LiteralOutOfRange { literal: 2, num_vars: 1 })
        );
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::UnterminatedClause));
    }

    #[test]
    fn empty_clause_is_kept() {
        let cnf = parse_dimacs("p cnf 1 1\n0\n").unwrap();
        assert_eq!(cnf.clauses, vec![Vec::<i32>::new()]);
    }
}
