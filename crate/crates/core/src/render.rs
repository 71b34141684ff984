//! Rendering back to the concrete syntax. `parse(render(f))` returns `f`
//! for any formula free of lambda components.

use crate::formula::{Atom, Formula};

pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    go(f, 1, &mut out);
    out
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

fn go(f: &Formula, min: u8, out: &mut String) {
    let needs_parens = prec(f) < min;
    if needs_parens {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => render_atom(a, out),
        Formula::Not(a) => {
            out.push_str("!(");
            go(a, 0, out);
            out.push(')');
        }
        Formula::And(a, b) => {
            go(a, 2, out);
            out.push_str(" && ");
            go(b, 3, out);
        }
        Formula::Or(a, b) => {
            go(a, 1, out);
            out.push_str(" || ");
            go(b, 2, out);
        }
        Formula::Exists(v, a) => {
            out.push_str("exists ");
            out.push_str(v.name());
            out.push_str(". ");
            go(a, 0, out);
        }
        Formula::Forall(v, a) => {
            out.push_str("forall ");
            out.push_str(v.name());
            out.push_str(". ");
            go(a, 0, out);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

fn render_atom(a: &Atom, out: &mut String) {
    match a {
        Atom::Less(t) => {
            out.push_str(&t.to_string());
            out.push_str(" < 0");
        }
        Atom::Div(q, t) => {
            out.push_str(&q.to_string());
            out.push_str(" | ");
            out.push_str(&t.to_string());
        }
        Atom::Pow2(t) => {
            out.push_str("P(");
            out.push_str(&t.to_string());
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_str, Dialect};

    #[test]
    fn render_true() {
        assert_eq!(render(&Formula::True), "true");
    }

    #[test]
    fn round_trips_handwritten() {
        let cases = [
            "3*pow(x) - 5*pow(y) - z < 0",
            "exists x. forall y. !(x - y < 0) && (2 | x + 1 || x < 0)",
            "abs(x) - 3 < 0",
            "(x < 0 || y < 0) && true",
        ];
        for c in cases {
            let f = parse_str(c, Dialect::PresExp).unwrap();
            let r = render(&f);
            let g = parse_str(&r, Dialect::PresExp).unwrap();
            assert_eq!(f, g, "through {r}");
        }
    }

    #[test]
    fn golden_running_example() {
        let f = parse_str("3*pow(x) - 5*pow(y) - z < 0", Dialect::PresExp).unwrap();
        assert_eq!(render(&f), "3*pow(x) - 5*pow(y) - z < 0");
    }

    #[test]
    fn round_trips_prespower() {
        let f = parse_str("P(x) && 3 | x", Dialect::PresPower).unwrap();
        let g = parse_str(&render(&f), Dialect::PresPower).unwrap();
        assert_eq!(f, g);
    }
}
