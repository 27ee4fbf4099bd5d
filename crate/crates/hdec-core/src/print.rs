//! Canonical text rendering for problems, the inverse of [`crate::parse`].

use std::fmt::Write;

use crate::cformula::{Butvpi, CFormula};
use crate::model::{BoolExpr, Problem, Schema, ViewDef};

/// Renders a problem in the line-oriented format accepted by
/// [`crate::parse::parse_problem`].  For problems that validate and carry no
/// empty conjunctions, parsing the output reproduces the same value.
pub fn problem_to_text(problem: &Problem) -> String {
    let mut out = String::new();
    let sc = &problem.schema;
    let _ = writeln!(out, "schema {}(x:{}, y:{})", sc.name, sc.x_arity, sc.y_arity);
    let _ = writeln!(out, "mode {}", problem.mode);
    for cdc in &problem.cdcs {
        let _ = writeln!(out, "cdc: {cdc}");
    }
    for view in &problem.views {
        let _ = writeln!(out, "view {}: {}", view.name, view_body(view));
    }
    for uind in &problem.uinds {
        let _ = writeln!(
            out,
            "uind: R[{}] <= R[{}]",
            column(uind.lhs, sc),
            column(uind.rhs, sc)
        );
    }
    for fd in &problem.fds {
        let _ = writeln!(out, "fd: {fd}");
    }
    out
}

/// Writes a global position back in its `x<i>` / `y<i>` spelling.
fn column(position: usize, schema: &Schema) -> String {
    if position <= schema.x_arity {
        format!("x{position}")
    } else {
        format!("y{}", position - schema.x_arity)
    }
}

/// The body after `view <Name>:`.  The selection condition and a top-level
/// boolean disjunction both need parentheses when joined to the other part
/// with `&`, because `&` binds tighter than `|` on input.
fn view_body(view: &ViewDef) -> String {
    match &view.y_condition {
        None => view.x_condition.to_string(),
        Some(y) => {
            let x = match &view.x_condition {
                or @ BoolExpr::Or(_) => format!("({or})"),
                other => other.to_string(),
            };
            let y = match y {
                CFormula::Butvpi(b @ Butvpi::Or(_)) => format!("({b})"),
                other => other.to_string(),
            };
            format!("{x} & {y}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    #[test]
    fn round_trips_a_problem_with_every_declaration_kind() {
        let text = r#"
            schema Emp(x:3, y:2)
            mode utvpi
            cdc: x2 = "ICT" -> y1 + y2 <= 5
            cdc: x3 = "Manager" -> y2 >= 2
            cdc: top -> y1 - y2 >= 0
            view V1: !(x2 = "ICT") & x3 = "Manager"
            view V2: top & y2 < 4
            view V3: (x1 = "a" | x2 = "b") & y1 <= 1
            uind: R[x1] <= R[x2]
            uind: R[y2] <= R[y1]
            fd: {1, 2} -> {4}
        "#;
        let problem = parse_problem(text, None).unwrap();
        let printed = problem_to_text(&problem);
        let reparsed = parse_problem(&printed, None).unwrap();
        assert_eq!(problem, reparsed);
        // Canonical output is a fixpoint of parse-then-print.
        assert_eq!(printed, problem_to_text(&reparsed));
    }

    #[test]
    fn round_trips_boolean_mode_conditions() {
        let text = "
            schema R(x:1, y:2)
            mode butvpi
            cdc: x1 != a -> y1 <= 0 | (y1 >= 4 & y2 <= 2)
            view V: top & (y1 <= 0 | !(y1 <= 2 & y2 <= 2))
        ";
        let problem = parse_problem(text, None).unwrap();
        let printed = problem_to_text(&problem);
        assert_eq!(problem, parse_problem(&printed, None).unwrap());
    }

    #[test]
    fn prints_the_expected_surface_forms() {
        let text = "
            schema R(x:1, y:1)
            mode utvpi
            cdc: top -> y1 < 4
            view V: x1 = a | y1 > 2
        ";
        let printed = problem_to_text(&parse_problem(text, None).unwrap());
        let lines: Vec<&str> = printed.lines().collect();
        assert_eq!(
            lines,
            vec![
                "schema R(x:1, y:1)",
                "mode utvpi",
                "cdc: top -> y1 <= 3",
                "view V_x: x1 = \"a\"",
                "view V_y: top & -y1 <= -3",
            ]
        );
    }
}
