//! Line-oriented text formats for instances and matchings.
//!
//! ```text
//! # comment
//! agent <id> <capacity>
//! house <id> <capacity>
//! edge <agent-id> <house-id> <rank>
//! ```
//!
//! A matching file holds one `<agent-id> <house-id>` pair per line.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{validate_matching, BMatching, Instance, InstanceBuilder};

/// Splits `text` into `(line number, tokens)` for non-blank lines, with
/// `#` comments stripped.
pub(crate) fn tokenized_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub(crate) fn parse_int(line: usize, tok: &str) -> Result<i64> {
    tok.parse::<i64>().map_err(|_| Error::Syntax {
        line,
        message: format!("expected an integer, found {tok:?}"),
    })
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<()> {
    if toks.len() != n {
        return Err(Error::Syntax {
            line,
            message: format!("`{}` takes {} arguments", toks[0], n - 1),
        });
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut b = InstanceBuilder::new();
    for (line, toks) in tokenized_lines(text) {
        match toks[0] {
            "agent" => {
                arity(line, &toks, 3)?;
                b.agent(toks[1], parse_int(line, toks[2])?)?;
            }
            "house" => {
                arity(line, &toks, 3)?;
                b.house(toks[1], parse_int(line, toks[2])?)?;
            }
            "edge" => {
                arity(line, &toks, 4)?;
                b.edge(toks[1], toks[2], parse_int(line, toks[3])?)?;
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    message: format!("unknown directive {other:?}"),
                })
            }
        }
    }
    b.build()
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for a in 0..inst.num_agents() {
        writeln!(out, "agent {} {}", inst.agent_name(a), inst.agent_capacity(a)).unwrap();
    }
    for h in 0..inst.num_houses() {
        writeln!(out, "house {} {}", inst.house_name(h), inst.house_capacity(h)).unwrap();
    }
    for e in inst.edges() {
        writeln!(
            out,
            "edge {} {} {}",
            inst.agent_name(e.agent),
            inst.house_name(e.house),
            e.rank
        )
        .unwrap();
    }
    out
}

pub fn parse_matching(inst: &Instance, text: &str) -> Result<BMatching> {
    let mut pairs = Vec::new();
    for (line, toks) in tokenized_lines(text) {
        if toks.len() != 2 {
            return Err(Error::Syntax {
                line,
                message: "expected `<agent> <house>`".into(),
            });
        }
        pairs.push((toks[0], toks[1]));
    }
    validate_matching(inst, &pairs)
}

pub fn serialize_matching(inst: &Instance, m: &BMatching) -> String {
    let mut out = String::new();
    for (a, h) in m.pairs(inst) {
        writeln!(out, "{a} {h}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_instance() {
        let inst = parse_instance("agent a 1\nhouse h 1\nedge a h 1\n").unwrap();
        assert_eq!((inst.num_agents(), inst.num_houses(), inst.num_edges()), (1, 1, 1));
        assert_eq!(inst.max_rank(), 1);
    }

    #[test]
    fn duplicate_edge_rejected() {
        let err = parse_instance("agent a 1\nhouse h 1\nedge a h 1\nedge a h 2\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { .. }));
    }

    #[test]
    fn ties_flagged() {
        let inst =
            parse_instance("agent a 2\nhouse h1 1\nhouse h2 1\nedge a h1 2\nedge a h2 2\n").unwrap();
        assert!(inst.has_ties());
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = parse_instance("agent a 1\n# c\nhouse h x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 3,
                message: "expected an integer, found \"x\"".into()
            }
        );
        assert!(matches!(parse_instance("vertex a"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_instance("agent a 1\nedge a h 1"),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(parse_instance("house h 0"), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let inst = parse_instance("# header\n\nagent a 2 # trailing\nhouse h 1\n").unwrap();
        assert_eq!(inst.agent_capacity(0), 2);
    }

    #[test]
    fn matching_file() {
        let inst = parse_instance("agent a 2\nhouse h1 1\nhouse h2 1\nedge a h2 2\nedge a h1 1\n").unwrap();
        let m = parse_matching(&inst, "a h2\n a h1 \n").unwrap();
        assert_eq!(serialize_matching(&inst, &m), "a h1\na h2\n");
        assert!(parse_matching(&inst, "a").is_err());
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..4, 1usize..4).prop_flat_map(|(na, nh)| {
            (
                prop::collection::vec(1u32..3, na),
                prop::collection::vec(1u32..3, nh),
                prop::collection::vec(0u32..4, na * nh),
            )
                .prop_map(move |(ac, hc, ranks)| {
                    let edges: Vec<_> = ranks
                        .iter()
                        .enumerate()
                        .filter(|(_, &r)| r > 0)
                        .map(|(i, &r)| (i / nh, i % nh, r))
                        .collect();
                    Instance::from_parts(&ac, &hc, &edges).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn instance_round_trip(inst in arb_instance()) {
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(serialize_instance(&back), text);
        }
    }
}
