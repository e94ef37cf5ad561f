//! Reference evaluator: applies the finite-trace semantics position by
//! position on plain vectors, without any bitmap machinery. Slow on
//! purpose; it exists to check the bitmap evaluator.

use crate::ltl::Formula;
use crate::trace::Trace;

use super::EvalError;

/// Truth value of `f` at every position of `trace`.
pub fn oracle_eval(f: &Formula, trace: &Trace) -> Result<Vec<bool>, EvalError> {
    let n = trace.len();
    Ok(match f {
        Formula::Atom(name) => trace
            .column(name)
            .ok_or_else(|| EvalError::UnboundAtom(name.to_string()))?,
        Formula::Not(g) => oracle_eval(g, trace)?.iter().map(|&x| !x).collect(),
        Formula::And(l, r) => zip(oracle_eval(l, trace)?, oracle_eval(r, trace)?, |x, y| {
            x && y
        }),
        Formula::Or(l, r) => zip(oracle_eval(l, trace)?, oracle_eval(r, trace)?, |x, y| {
            x || y
        }),
        Formula::Implies(l, r) => zip(oracle_eval(l, trace)?, oracle_eval(r, trace)?, |x, y| {
            !x || y
        }),
        Formula::Next(g) => {
            let a = oracle_eval(g, trace)?;
            (0..n).map(|i| i + 1 < n && a[i + 1]).collect()
        }
        Formula::Globally(g) => {
            let a = oracle_eval(g, trace)?;
            (0..n).map(|i| (i..n).all(|j| a[j])).collect()
        }
        Formula::Finally(g) => {
            let a = oracle_eval(g, trace)?;
            (0..n).map(|i| (i..n).any(|j| a[j])).collect()
        }
        Formula::Until(l, r) => {
            let a = oracle_eval(l, trace)?;
            let b = oracle_eval(r, trace)?;
            (0..n)
                .map(|i| (i..n).any(|j| b[j] && (i..j).all(|k| a[k])))
                .collect()
        }
    })
}

/// Verdict for the whole trace, including the empty trace.
pub fn oracle_verdict(f: &Formula, trace: &Trace) -> Result<bool, EvalError> {
    if trace.is_empty() {
        return Ok(empty(f));
    }
    Ok(oracle_eval(f, trace)?[0])
}

fn empty(f: &Formula) -> bool {
    match f {
        Formula::Globally(_) => true,
        Formula::Atom(_) | Formula::Finally(_) | Formula::Next(_) | Formula::Until(..) => false,
        Formula::Not(g) => !empty(g),
        Formula::And(l, r) => empty(l) && empty(r),
        Formula::Or(l, r) => empty(l) || empty(r),
        Formula::Implies(l, r) => !empty(l) || empty(r),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn trace(cols: &[(&str, &str)]) -> Trace {
        let n = cols[0].1.len();
        let vars = cols.iter().map(|(v, _)| v.to_string()).collect();
        let events: Vec<Vec<bool>> = (0..n)
            .map(|i| cols.iter().map(|(_, c)| c.as_bytes()[i] == b'1').collect())
            .collect();
        Trace::from_events(vars, &events).unwrap()
    }

    fn render(v: &[bool]) -> String {
        v.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn worked_examples() {
        let t = trace(&[("s0", "1110"), ("s1", "0010")]);
        assert_eq!(
            render(&oracle_eval(&parse("s0 U s1").unwrap(), &t).unwrap()),
            "1110"
        );
        let t = trace(&[("a", "1011"), ("b", "0100")]);
        assert_eq!(
            render(&oracle_eval(&parse("a U b").unwrap(), &t).unwrap()),
            "1100"
        );
        let t = trace(&[("s0", "1101")]);
        assert_eq!(
            render(&oracle_eval(&parse("G s0").unwrap(), &t).unwrap()),
            "0001"
        );
        assert_eq!(
            render(&oracle_eval(&parse("X s0").unwrap(), &trace(&[("s0", "1")])).unwrap()),
            "0"
        );
        let t = trace(&[("s0", "1111")]);
        assert_eq!(
            render(&oracle_eval(&parse("G s0").unwrap(), &t).unwrap()),
            "1111"
        );
    }

    #[test]
    fn empty_trace_verdicts() {
        let t = Trace::new(vec!["p".into()]).unwrap();
        let v = |f: &str| oracle_verdict(&parse(f).unwrap(), &t).unwrap();
        assert!(v("G p"));
        assert!(!v("F p"));
        assert!(!v("X p"));
        assert!(!v("p U p"));
    }
}
