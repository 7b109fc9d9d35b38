//! APX text format (`arg(a).` / `att(a,b).`) used by standard AF solvers.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::framework::ArgumentationFramework;

/// Lowercase alphanumeric form of a name; empty if nothing survives.
pub fn sanitize_name(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Sanitized, collision-free names for every argument, in argument order.
pub fn export_names(af: &ArgumentationFramework) -> Vec<String> {
    let mut used = HashSet::with_capacity(af.len());
    af.names()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut candidate = sanitize_name(name);
            if candidate.is_empty() {
                candidate = format!("arg{i}");
            }
            let base = candidate.clone();
            let mut suffix = i;
            while !used.insert(candidate.clone()) {
                candidate = format!("{base}x{suffix}");
                suffix += 1;
            }
            candidate
        })
        .collect()
}

/// Renders the framework as APX, one statement per line, lines sorted.
pub fn export_apx(af: &ArgumentationFramework) -> String {
    let names = export_names(af);
    let mut lines: Vec<String> = names.iter().map(|n| format!("arg({n}).")).collect();
    lines.extend(
        af.attacks()
            .iter()
            .map(|&(a, b)| format!("att({},{}).", names[a], names[b])),
    );
    lines.sort();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses APX text. Arguments are numbered in order of first declaration.
///
/// `%` starts a comment running to end of line. Attacks may only mention
/// declared arguments.
pub fn parse_apx(text: &str) -> Result<ArgumentationFramework> {
    let mut names = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut attacks = BTreeSet::new();
    let mut pending_attacks = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('%').next().unwrap_or("");
        for stmt in line.split('.') {
            let stmt: String = stmt.chars().filter(|c| !c.is_whitespace()).collect();
            if stmt.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: bad statement {stmt:?}", lineno + 1));
            let (head, rest) = stmt.split_once('(').ok_or_else(bad)?;
            let body = rest.strip_suffix(')').ok_or_else(bad)?;
            match head {
                "arg" => {
                    if body.is_empty() || body.contains(',') {
                        return Err(bad());
                    }
                    if !index.contains_key(body) {
                        index.insert(body.to_string(), names.len());
                        names.push(body.to_string());
                    }
                }
                "att" => {
                    let (a, b) = body.split_once(',').ok_or_else(bad)?;
                    if a.is_empty() || b.is_empty() || b.contains(',') {
                        return Err(bad());
                    }
                    pending_attacks.push((lineno + 1, a.to_string(), b.to_string()));
                }
                _ => return Err(bad()),
            }
        }
    }
    for (lineno, a, b) in pending_attacks {
        let lookup = |n: &str| {
            index.get(n).copied().ok_or_else(|| {
                Error::Parse(format!(
                    "line {lineno}: attack mentions undeclared argument {n:?}"
                ))
            })
        };
        attacks.insert((lookup(&a)?, lookup(&b)?));
    }
    ArgumentationFramework::new(names, attacks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_argument() {
        let af = ArgumentationFramework::new(vec!["a".into()], []).unwrap();
        assert_eq!(export_apx(&af), "arg(a).\n");
    }

    #[test]
    fn one_attack() {
        let af = ArgumentationFramework::new(vec!["a".into(), "b".into()], [(0, 1)]).unwrap();
        assert_eq!(export_apx(&af), "arg(a).\narg(b).\natt(a,b).\n");
    }

    #[test]
    fn names_are_sanitized_and_disambiguated() {
        let af = ArgumentationFramework::new(
            vec!["Arg One".into(), "argone".into(), "--".into()],
            [(0, 2)],
        )
        .unwrap();
        let names = export_names(&af);
        assert_eq!(names[0], "argone");
        assert_ne!(names[1], names[0]);
        assert_eq!(names[2], "arg2");
        assert!(names.iter().all(|n| n
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())));
    }

    #[test]
    fn parser_accepts_comments_and_spacing() {
        let af = parse_apx("% header\narg( x ). arg(y).\n att(x , y). % trailing\n").unwrap();
        assert_eq!(af.len(), 2);
        assert!(af.attacks_pair(0, 1));
    }

    #[test]
    fn parser_rejects_undeclared_and_garbage() {
        assert!(matches!(
            parse_apx("arg(a).\natt(a,b).\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_apx("foo(a).\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_apx("arg(a\n"), Err(Error::Parse(_))));
    }

    fn arb_af() -> impl Strategy<Value = ArgumentationFramework> {
        (0usize..=12).prop_flat_map(|n| {
            let pairs = proptest::collection::vec((0..n.max(1), 0..n.max(1)), 0..=n * n);
            pairs.prop_map(move |attacks| {
                let attacks = if n == 0 { Vec::new() } else { attacks };
                ArgumentationFramework::with_indexed_names(n, attacks).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn export_then_parse_round_trips(af in arb_af()) {
            let back = parse_apx(&export_apx(&af)).unwrap();
            prop_assert_eq!(back.canonical(), af.canonical());
        }
    }
}
