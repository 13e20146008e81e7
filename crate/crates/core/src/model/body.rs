//! Token-level facts about a method body.

use std::collections::BTreeSet;

use super::lexer::{Token, TokenKind};

/// Keywords that look like `name(` but are not invocations.
const NON_CALL_WORDS: &[&str] = &[
    "if", "for", "while", "switch", "catch", "synchronized", "return", "new", "throw", "super",
    "this", "try", "do", "else", "assert", "case", "yield",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="];

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub(crate) struct BodyFacts {
    pub cyclomatic: usize,
    pub conditionals: usize,
    pub loops: usize,
    pub returns: usize,
    pub invoked_names: Vec<String>,
    pub max_chain_length: usize,
    /// Bare or `this.`-qualified identifiers that may name own-class fields.
    pub used: BTreeSet<String>,
    pub written: BTreeSet<String>,
    pub locals: BTreeSet<String>,
    /// Identifiers reached through `this.`; parameters cannot shadow these.
    pub this_fields: BTreeSet<String>,
    pub qualified_accesses: BTreeSet<(String, String)>,
}

fn is_wildcard(tokens: &[Token], i: usize) -> bool {
    let prev = i.checked_sub(1).map(|p| &tokens[p]);
    let next = tokens.get(i + 1);
    prev.is_some_and(|p| p.is("<") || p.is(","))
        && next.is_some_and(|n| n.is(">") || n.is(",") || n.is_word("extends") || n.is_word("super"))
        || prev.is_some_and(|p| p.is("<"))
}

fn is_type_like(tok: &Token) -> bool {
    (tok.is_ident() && !NON_CALL_WORDS.contains(&tok.text.as_str()) && tok.text != "else")
        || tok.is(">")
        || tok.is("]")
}

/// Scans the tokens strictly inside a method body's braces.
pub(crate) fn analyze(tokens: &[Token]) -> BodyFacts {
    let mut facts = BodyFacts {
        cyclomatic: 1,
        ..BodyFacts::default()
    };

    // Brace depth at which each pending `do` was opened; the `while` that
    // closes it is part of the same loop and is not counted again.
    let mut pending_do: Vec<usize> = Vec::new();
    let mut brace_depth = 0usize;
    let mut chain: Vec<usize> = vec![0];

    for (i, tok) in tokens.iter().enumerate() {
        let prev = i.checked_sub(1).map(|p| &tokens[p]);
        let next = tokens.get(i + 1);
        let after_dot = prev.is_some_and(|p| p.is(".") || p.is("::"));

        match tok.kind {
            TokenKind::Ident if !after_dot => match tok.text.as_str() {
                "if" => {
                    facts.cyclomatic += 1;
                    facts.conditionals += 1;
                }
                "for" => {
                    facts.cyclomatic += 1;
                    facts.loops += 1;
                }
                "do" => {
                    facts.cyclomatic += 1;
                    facts.loops += 1;
                    pending_do.push(brace_depth);
                }
                "while" => {
                    let closes_do = pending_do.last() == Some(&brace_depth)
                        && prev.is_some_and(|p| p.is("}") || p.is(";"));
                    if closes_do {
                        pending_do.pop();
                    } else {
                        facts.cyclomatic += 1;
                        facts.loops += 1;
                    }
                }
                "case" => facts.cyclomatic += 1,
                "switch" => facts.conditionals += 1,
                "catch" => facts.cyclomatic += 1,
                "return" => facts.returns += 1,
                _ => {}
            },
            TokenKind::Punct => match tok.text.as_str() {
                "&&" | "||" => facts.cyclomatic += 1,
                "?" if !is_wildcard(tokens, i) => {
                    facts.cyclomatic += 1;
                    facts.conditionals += 1;
                }
                _ => {}
            },
            _ => {}
        }

        // Invocations and chains.
        if tok.is_ident() && next.is_some_and(|n| n.is("(")) {
            let declared_here = prev.is_some_and(|p| is_type_like(p) && !p.is("]")) && !after_dot;
            let constructed = prev.is_some_and(|p| p.is_word("new"));
            if !NON_CALL_WORDS.contains(&tok.text.as_str()) && !declared_here && !constructed {
                facts.invoked_names.push(tok.text.clone());
            }
        }

        let top = chain.len() - 1;
        match tok.text.as_str() {
            "(" | "[" if tok.kind == TokenKind::Punct => chain.push(0),
            ")" | "]" if tok.kind == TokenKind::Punct => {
                if chain.len() > 1 {
                    chain.pop();
                }
            }
            "{" | "}" if tok.kind == TokenKind::Punct => {
                chain[top] = 0;
                if tok.text == "{" {
                    brace_depth += 1;
                } else {
                    brace_depth = brace_depth.saturating_sub(1);
                }
            }
            "." if tok.kind == TokenKind::Punct => {}
            _ if tok.is_ident() && after_dot => {
                if next.is_some_and(|n| n.is("(")) {
                    chain[top] += 1;
                    facts.max_chain_length = facts.max_chain_length.max(chain[top]);
                }
            }
            _ if tok.is_ident() && (tok.text == "this" || tok.text == "super") => chain[top] = 0,
            _ => chain[top] = 0,
        }

        // Field candidates, locals and writes.
        if tok.is_ident() && !NON_CALL_WORDS.contains(&tok.text.as_str()) {
            let via_this = after_dot && i >= 2 && tokens[i - 2].is_word("this") && prev.is_some_and(|p| p.is("."));
            let bare = !after_dot;
            let is_call = next.is_some_and(|n| n.is("("));
            if via_this && !is_call {
                facts.this_fields.insert(tok.text.clone());
            }
            if (bare || via_this) && !is_call {
                let declares_local = bare
                    && prev.is_some_and(is_type_like)
                    && next.is_some_and(|n| n.is("=") || n.is(";") || n.is(",") || n.is(":") || n.is(")"));
                if declares_local {
                    facts.locals.insert(tok.text.clone());
                } else {
                    facts.used.insert(tok.text.clone());
                    let assigned = next.is_some_and(|n| {
                        n.kind == TokenKind::Punct
                            && (ASSIGN_OPS.contains(&n.text.as_str()) || n.text == "++" || n.text == "--")
                    });
                    let pre_inc = if via_this {
                        i >= 3 && (tokens[i - 3].is("++") || tokens[i - 3].is("--"))
                    } else {
                        prev.is_some_and(|p| p.is("++") || p.is("--"))
                    };
                    if assigned || pre_inc {
                        facts.written.insert(tok.text.clone());
                    }
                }
            }
            if bare
                && next.is_some_and(|n| n.is("."))
                && tokens.get(i + 2).is_some_and(|m| m.is_ident())
                && !tokens.get(i + 3).is_some_and(|n| n.is("("))
                && tok.text != "this"
            {
                facts
                    .qualified_accesses
                    .insert((tok.text.clone(), tokens[i + 2].text.clone()));
            }
        }
    }
    facts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lexer::tokenize;

    fn facts(src: &str) -> BodyFacts {
        analyze(&tokenize(src).unwrap())
    }

    #[test]
    fn empty_body_is_one() {
        assert_eq!(facts("").cyclomatic, 1);
    }

    #[test]
    fn two_ifs_and_a_for() {
        let f = facts("if (a) x(); if (b) y(); for (int i = 0; i < n; i++) z();");
        assert_eq!(f.cyclomatic, 4);
        assert_eq!(f.conditionals, 2);
        assert_eq!(f.loops, 1);
    }

    #[test]
    fn nested_switch_inside_if() {
        // 1 + if + three case labels
        let f = facts(
            "if (ready) { switch (mode) { case 1: a(); break; case 2: b(); break; case 3: c(); break; default: d(); } }",
        );
        assert_eq!(f.cyclomatic, 5);
    }

    #[test]
    fn do_while_counts_once() {
        let f = facts("do { i++; } while (i < 3); while (j) { j--; }");
        assert_eq!(f.cyclomatic, 3);
        assert_eq!(f.loops, 2);
    }

    #[test]
    fn ternary_logic_and_catch() {
        let f = facts("try { x = a && b || c ? 1 : 2; } catch (E e) { } List<? extends T> l;");
        assert_eq!(f.cyclomatic, 1 + 2 + 1 + 1);
    }

    #[test]
    fn chain_counts_after_first_receiver() {
        assert_eq!(facts("a.b().c().d();").max_chain_length, 3);
        assert_eq!(facts("x = a.b().c.d(e.f().g().h().i());").max_chain_length, 4);
        assert_eq!(facts("foo(); bar();").max_chain_length, 0);
    }

    #[test]
    fn invocations_skip_keywords_and_constructors() {
        let f = facts("if (ok()) { new Thing(1); this.run(); super.stop(); }");
        assert_eq!(f.invoked_names, ["ok", "run", "stop"]);
    }

    #[test]
    fn field_touches() {
        let f = facts("int tmp = count; this.total += tmp; name = other.name; ++hits;");
        assert!(f.locals.contains("tmp"));
        assert!(f.used.contains("count"));
        assert!(f.written.contains("total"));
        assert!(f.written.contains("name"));
        assert!(f.written.contains("hits"));
        assert!(!f.used.contains("other") || !f.written.contains("other"));
    }

    #[test]
    fn qualified_static_access() {
        let f = facts("Config.DEBUG = true; Log.d(x);");
        assert!(f.qualified_accesses.contains(&("Config".into(), "DEBUG".into())));
        assert!(!f.qualified_accesses.iter().any(|(a, _)| a == "Log"));
    }
}
