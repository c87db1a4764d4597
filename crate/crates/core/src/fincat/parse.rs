//! Plain-text category description files.
//!
//! ```text
//! # a three-object chain
//! object a
//! object b
//! object c
//! arrow f : a -> b
//! arrow g : b -> c
//! arrow h : a -> c
//! compose g f = h
//! ```
//!
//! Identities are implicit: every object `X` gets an arrow `1_X`, usable in
//! `compose` lines (e.g. `compose g f = 1_a` for an isomorphism pair).
//! Compositions with identities are filled in automatically; all other
//! composites must be listed.

use thiserror::Error;

use super::{BuildError, CatBuilder, FinCat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected {expected}, got {got:?}")]
    Syntax {
        line: usize,
        expected: &'static str,
        got: String,
    },
    #[error("line {line}: undeclared id {id:?}")]
    UndeclaredId { line: usize, id: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {g:?} does not compose with {f:?}")]
    NotComposable { line: usize, g: String, f: String },
    #[error("line {line}: conflicting composite for ({g:?}, {f:?})")]
    ConflictingComposite { line: usize, g: String, f: String },
    #[error("line {line}: arrow name {name:?} is reserved for an identity")]
    ReservedName { line: usize, name: String },
}

fn build_error_at(line: usize, e: BuildError) -> ParseError {
    match e {
        BuildError::Duplicate(id) => ParseError::DuplicateId { line, id },
        BuildError::Undeclared(id) => ParseError::UndeclaredId { line, id },
        BuildError::ReservedName(name) => ParseError::ReservedName { line, name },
        BuildError::NotComposable { g, f } => ParseError::NotComposable { line, g, f },
        BuildError::ConflictingComposite { g, f } => {
            ParseError::ConflictingComposite { line, g, f }
        }
    }
}

/// Parses a category description. Undeclared or malformed ids are rejected
/// with their line number; category *laws* are not checked here.
pub fn parse_category(text: &str) -> Result<FinCat, ParseError> {
    let mut builder = CatBuilder::new();
    // builder is only consulted at the end, so errors carry the line of the
    // declaration that introduced the problem; track declarations ourselves
    // for early reporting.
    let mut objects: Vec<String> = Vec::new();
    let mut arrows: Vec<String> = Vec::new();
    let mut composes: Vec<(usize, String, String)> = Vec::new();
    let mut decl_lines: Vec<usize> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "object" => {
                if tokens.len() != 2 {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        expected: "object <name>",
                        got: line.to_string(),
                    });
                }
                if objects.iter().any(|o| o == tokens[1]) {
                    return Err(ParseError::DuplicateId {
                        line: line_no,
                        id: tokens[1].to_string(),
                    });
                }
                objects.push(tokens[1].to_string());
                builder.object(tokens[1]);
            }
            "arrow" => {
                // arrow f : X -> Y
                if tokens.len() != 6 || tokens[2] != ":" || tokens[4] != "->" {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        expected: "arrow <name> : <dom> -> <cod>",
                        got: line.to_string(),
                    });
                }
                let (name, dom, cod) = (tokens[1], tokens[3], tokens[5]);
                if arrows.iter().any(|a| a == name) {
                    return Err(ParseError::DuplicateId {
                        line: line_no,
                        id: name.to_string(),
                    });
                }
                for o in [dom, cod] {
                    if !objects.iter().any(|x| x == o) {
                        return Err(ParseError::UndeclaredId {
                            line: line_no,
                            id: o.to_string(),
                        });
                    }
                }
                arrows.push(name.to_string());
                builder.arrow(name, dom, cod);
                decl_lines.push(line_no);
            }
            "compose" => {
                // compose g f = h
                if tokens.len() != 5 || tokens[3] != "=" {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        expected: "compose <g> <f> = <gf>",
                        got: line.to_string(),
                    });
                }
                let known = |id: &str| {
                    arrows.iter().any(|a| a == id)
                        || (id.starts_with("1_") && objects.iter().any(|o| format!("1_{o}") == id))
                };
                for id in [tokens[1], tokens[2], tokens[4]] {
                    if !known(id) {
                        return Err(ParseError::UndeclaredId {
                            line: line_no,
                            id: id.to_string(),
                        });
                    }
                }
                builder.composite(tokens[1], tokens[2], tokens[4]);
                composes.push((line_no, tokens[1].to_string(), tokens[2].to_string()));
            }
            other => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    expected: "object | arrow | compose",
                    got: other.to_string(),
                });
            }
        }
    }

    builder.build().map_err(|e| {
        // attribute builder-detected problems to the closest source line
        let line = match &e {
            BuildError::NotComposable { g, f } | BuildError::ConflictingComposite { g, f } => {
                composes
                    .iter()
                    .find(|(_, cg, cf)| cg == g && cf == f)
                    .map(|(l, _, _)| *l)
                    .unwrap_or(0)
            }
            _ => decl_lines.last().copied().unwrap_or(0),
        };
        build_error_at(line, e)
    })
}

/// Writes a category in the description format. Identity arrows are left
/// implicit; composites with an identity on either side are omitted, and a
/// composite that *equals* an identity is written as `1_<object>`.
pub fn category_description(c: &FinCat) -> String {
    let mut out = String::new();
    for x in 0..c.object_count() {
        out.push_str(&format!("object {}\n", c.object_name(x)));
    }
    let arrow_ref = |f: usize| {
        if c.is_identity(f) {
            format!("1_{}", c.object_name(c.dom(f)))
        } else {
            c.arrow_name(f).to_string()
        }
    };
    for f in 0..c.arrow_count() {
        if c.is_identity(f) {
            continue;
        }
        out.push_str(&format!(
            "arrow {} : {} -> {}\n",
            c.arrow_name(f),
            c.object_name(c.dom(f)),
            c.object_name(c.cod(f))
        ));
    }
    let mut entries: Vec<(usize, usize, usize)> = c
        .composition_table()
        .iter()
        .filter(|(&(g, f), _)| !c.is_identity(g) && !c.is_identity(f))
        .map(|(&(g, f), &gf)| (g, f, gf))
        .collect();
    entries.sort();
    for (g, f, gf) in entries {
        out.push_str(&format!(
            "compose {} {} = {}\n",
            arrow_ref(g),
            arrow_ref(f),
            arrow_ref(gf)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{categories_isomorphic, check_category};

    const CHAIN: &str = "\
# three-object chain
object a
object b
object c
arrow f : a -> b
arrow g : b -> c
arrow h : a -> c
compose g f = h
";

    #[test]
    fn parses_chain() {
        let c = parse_category(CHAIN).unwrap();
        assert_eq!(c.object_count(), 3);
        assert_eq!(c.arrow_count(), 6); // three identities added
        assert!(check_category(&c).is_valid());
    }

    #[test]
    fn identities_usable_in_compose_lines() {
        let text = "\
object X
object Y
arrow f : X -> Y
arrow g : Y -> X
compose g f = 1_X
compose f g = 1_Y
";
        let c = parse_category(text).unwrap();
        assert!(check_category(&c).is_valid());
        let f = c.arrow_index("f").unwrap();
        assert!(crate::fincat::is_isomorphism(&c, f).is_some());
    }

    #[test]
    fn undeclared_ids_rejected_with_position() {
        let text = "object a\narrow f : a -> b\n";
        assert_eq!(
            parse_category(text),
            Err(ParseError::UndeclaredId {
                line: 2,
                id: "b".into()
            })
        );
        let text = "object a\narrow f : a -> a\ncompose f q = f\n";
        assert_eq!(
            parse_category(text),
            Err(ParseError::UndeclaredId {
                line: 3,
                id: "q".into()
            })
        );
    }

    #[test]
    fn syntax_and_duplicates_rejected() {
        assert!(matches!(
            parse_category("object a\nobject a\n"),
            Err(ParseError::DuplicateId { line: 2, .. })
        ));
        assert!(matches!(
            parse_category("arrowz\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_category("object a\narrow f : a => a\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn non_composable_pair_rejected() {
        let text = "\
object a
object b
arrow f : a -> b
arrow g : a -> b
compose g f = f
";
        assert!(matches!(
            parse_category(text),
            Err(ParseError::NotComposable { line: 5, .. })
        ));
    }

    #[test]
    fn description_round_trips_up_to_isomorphism() {
        let c = parse_category(CHAIN).unwrap();
        let text = category_description(&c);
        let d = parse_category(&text).unwrap();
        assert!(check_category(&d).is_valid());
        assert!(categories_isomorphic(&c, &d).unwrap().is_some());
    }

    #[test]
    fn iso_pair_description_round_trips() {
        let text = "\
object X
object Y
arrow f : X -> Y
arrow g : Y -> X
compose g f = 1_X
compose f g = 1_Y
";
        let c = parse_category(text).unwrap();
        let d = parse_category(&category_description(&c)).unwrap();
        assert!(check_category(&d).is_valid());
        assert!(categories_isomorphic(&c, &d).unwrap().is_some());
    }
}
