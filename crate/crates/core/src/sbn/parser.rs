//! Token stream to graph, with error recovery.

use super::lexer::{tokenize, BoxDirection, SbnToken, TokenKind};
use super::{ConceptNode, DrsGraph, RelationEdge, RoleEdge, RoleTarget, SbnError};

/// All-uppercase tokens that are roles (comparison and temporal operators,
/// anaphora) rather than discourse relations when not followed by a box
/// index.
pub(crate) const UPPERCASE_ROLES: &[&str] = &[
    "ANA", "APX", "EQU", "LEQ", "LES", "NEQ", "SXN", "SXP", "SXY", "SZN", "SZP", "SZY", "STI", "STO", "TAB", "TIN",
    "TPR", "TSU",
];

/// Parses one document; the first error (in token order) wins.
pub fn parse(text: &str) -> Result<DrsGraph, SbnError> {
    let (graph, mut errors) = run(text);
    if errors.is_empty() {
        Ok(graph)
    } else {
        Err(errors.swap_remove(0))
    }
}

/// Every error in the document, in token order. A document is well formed
/// iff this returns `Ok`.
pub fn validate(text: &str) -> Result<(), Vec<SbnError>> {
    let (_, errors) = run(text);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

struct PendingRef {
    edge: usize,
    head: usize,
    offset: i64,
    position: usize,
    text: String,
}

struct PendingBox {
    edge: usize,
    target: u64,
    position: usize,
    relation: String,
}

fn is_argument(kind: &TokenKind) -> bool {
    matches!(kind, TokenKind::RefIndex(_) | TokenKind::Literal(_) | TokenKind::Number | TokenKind::Constant(_))
}

fn run(text: &str) -> (DrsGraph, Vec<SbnError>) {
    let tokens = tokenize(text);
    let mut g = DrsGraph::default();
    let mut errors = Vec::new();
    if tokens.is_empty() {
        errors.push(SbnError::EmptyDocument);
        return (g, errors);
    }

    let mut refs: Vec<PendingRef> = Vec::new();
    let mut forward_boxes: Vec<PendingBox> = Vec::new();
    let mut head: Option<usize> = None;
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        let next = tokens.get(i + 1);
        match &tok.kind {
            TokenKind::Concept(key) => {
                g.nodes.push(ConceptNode { concept: key.clone(), box_id: g.box_count - 1 });
                head = Some(g.nodes.len() - 1);
                i += 1;
            }
            TokenKind::Upper if matches!(next.map(|t| &t.kind), Some(TokenKind::BoxIndex(..))) => {
                let arg = next.unwrap();
                let TokenKind::BoxIndex(dir, k) = arg.kind else { unreachable!() };
                let source = g.box_count;
                g.box_count += 1;
                let bad = || SbnError::BadRelationArg { position: tok.position, relation: tok.text.clone() };
                match dir {
                    _ if k == 0 => errors.push(bad()),
                    BoxDirection::Before if k > source as u64 => errors.push(bad()),
                    BoxDirection::Before => {
                        g.relations.push(RelationEdge { source, relation: tok.text.clone(), target: source - k as usize })
                    }
                    BoxDirection::After => {
                        forward_boxes.push(PendingBox {
                            edge: g.relations.len(),
                            target: source as u64 + k,
                            position: tok.position,
                            relation: tok.text.clone(),
                        });
                        g.relations.push(RelationEdge { source, relation: tok.text.clone(), target: usize::MAX });
                    }
                }
                i += 2;
            }
            TokenKind::Upper if !UPPERCASE_ROLES.contains(&tok.text.as_str()) => {
                errors.push(SbnError::BadRelationArg { position: tok.position, relation: tok.text.clone() });
                i += if next.is_some_and(|t| is_argument(&t.kind)) { 2 } else { 1 };
            }
            TokenKind::Upper | TokenKind::Role => {
                i += role(tok, next, head, &mut g, &mut refs, &mut errors);
            }
            TokenKind::Invalid => {
                errors.push(SbnError::Lex { position: tok.position, token: tok.text.clone() });
                // Most likely a misspelt role: its argument goes with it.
                i += if next.is_some_and(|t| is_argument(&t.kind)) { 2 } else { 1 };
            }
            _ => {
                errors.push(SbnError::UnexpectedToken { position: tok.position, token: tok.text.clone() });
                i += 1;
            }
        }
    }

    let n = g.nodes.len() as i64;
    for r in refs {
        let target = r.head as i64 + r.offset;
        if (0..n).contains(&target) {
            g.roles[r.edge].target = RoleTarget::Node(target as usize);
        } else {
            errors.push(SbnError::DanglingIndex { position: r.position, index: r.text });
        }
    }
    for b in forward_boxes {
        if b.target < g.box_count as u64 {
            g.relations[b.edge].target = b.target as usize;
        } else {
            errors.push(SbnError::BadRelationArg { position: b.position, relation: b.relation });
        }
    }
    errors.sort_by_key(position);
    (g, errors)
}

/// Handles a role token and its argument; returns the number of tokens
/// consumed.
fn role(
    tok: &SbnToken,
    arg: Option<&SbnToken>,
    head: Option<usize>,
    g: &mut DrsGraph,
    refs: &mut Vec<PendingRef>,
    errors: &mut Vec<SbnError>,
) -> usize {
    let Some(arg) = arg else {
        errors.push(SbnError::TruncatedRole { position: tok.position, role: tok.text.clone() });
        return 1;
    };
    if !is_argument(&arg.kind) {
        if arg.kind == TokenKind::Invalid {
            errors.push(SbnError::Lex { position: arg.position, token: arg.text.clone() });
            return 2;
        }
        errors.push(match head {
            None => SbnError::RoleWithoutHead { position: tok.position, role: tok.text.clone() },
            Some(_) => SbnError::BadRoleArgument { position: tok.position, role: tok.text.clone(), found: arg.text.clone() },
        });
        return 1;
    }
    let Some(source) = head else {
        errors.push(SbnError::RoleWithoutHead { position: tok.position, role: tok.text.clone() });
        return 2;
    };
    let target = match &arg.kind {
        TokenKind::RefIndex(k) => {
            refs.push(PendingRef { edge: g.roles.len(), head: source, offset: *k, position: arg.position, text: arg.text.clone() });
            RoleTarget::Node(usize::MAX)
        }
        TokenKind::Literal(s) => RoleTarget::Literal(s.clone()),
        TokenKind::Number => RoleTarget::Number(arg.text.clone()),
        TokenKind::Constant(c) => RoleTarget::Constant(*c),
        _ => unreachable!("checked by is_argument"),
    };
    g.roles.push(RoleEdge { source, role: tok.text.clone(), target });
    2
}

fn position(e: &SbnError) -> usize {
    match e {
        SbnError::EmptyDocument => 0,
        SbnError::Lex { position, .. }
        | SbnError::RoleWithoutHead { position, .. }
        | SbnError::DanglingIndex { position, .. }
        | SbnError::BadRelationArg { position, .. }
        | SbnError::TruncatedRole { position, .. }
        | SbnError::BadRoleArgument { position, .. }
        | SbnError::UnexpectedToken { position, .. } => *position,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbn::{serialize, Constant};

    pub(crate) const MARY_GOLD: &str = "female.n.02 Name \"Mary\" time.n.08 TPR now birdwatch.v.01 Agent -2 Time -1 ELABORATION <1 female.n.02 ANA -3 see.v.01 Experiencer -1 Time +1 Stimulus +3 time.n.08 TPR now harrier.n.03 golden_eagle.n.01 entity.n.01 Sub -2 Sub -1 Sub +1 hobby.n.03";

    #[test]
    fn mary_gold_shape() {
        let g = parse(MARY_GOLD).unwrap();
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.box_count(), 2);
        assert_eq!(g.roles().len(), 12);
        assert_eq!(g.relations(), &[RelationEdge { source: 1, relation: "ELABORATION".into(), target: 0 }]);
        assert_eq!(g.nodes()[3].box_id, 1);
        assert_eq!(g.nodes()[2].box_id, 0);
        // entity.n.01 Sub +1 -> hobby.n.03
        let entity = 8;
        let subs: Vec<&RoleTarget> = g.roles().iter().filter(|r| r.source == entity).map(|r| &r.target).collect();
        assert_eq!(subs, vec![&RoleTarget::Node(6), &RoleTarget::Node(7), &RoleTarget::Node(9)]);
        assert_eq!(g.roles()[1].target, RoleTarget::Constant(Constant::Now));
        assert_eq!(serialize(&g), MARY_GOLD);
        assert_eq!(validate(MARY_GOLD), Ok(()));
    }

    #[test]
    fn forced_errors() {
        assert!(matches!(parse("Agent -1"), Err(SbnError::RoleWithoutHead { position: 0, .. })));
        assert!(matches!(parse("female.n.02 Agent -5"), Err(SbnError::DanglingIndex { position: 2, .. })));
        assert!(matches!(parse("female.n.02 Agent +1"), Err(SbnError::DanglingIndex { .. })));
        assert_eq!(parse(""), Err(SbnError::EmptyDocument));
        assert_eq!(validate("  % only a comment\n"), Err(vec![SbnError::EmptyDocument]));
        assert!(matches!(parse("female.n.02 Agent"), Err(SbnError::TruncatedRole { .. })));
        assert!(matches!(parse("female.n.02 NEGATION -1"), Err(SbnError::BadRelationArg { .. })));
        assert!(matches!(parse("female.n.02 NEGATION <2"), Err(SbnError::BadRelationArg { .. })));
        assert!(matches!(parse("female.n.02 NEGATION <0"), Err(SbnError::BadRelationArg { .. })));
        assert!(matches!(parse("female.n.02 NEGATION >1"), Err(SbnError::BadRelationArg { .. })));
        assert!(matches!(parse("female.n.02 wibble"), Err(SbnError::Lex { .. })));
        assert!(matches!(parse("female.n.02 -1"), Err(SbnError::UnexpectedToken { .. })));
        assert!(matches!(parse("female.n.02 Agent see.v.01"), Err(SbnError::BadRoleArgument { .. })));
    }

    #[test]
    fn recovery_reports_every_error() {
        let errors = validate("female.n.02 Agent -5 see.v.01 Bad~Role -1 Time now").unwrap_err();
        assert_eq!(errors.len(), 2, "{errors:?}");
        assert!(matches!(errors[0], SbnError::DanglingIndex { position: 2, .. }));
        assert!(matches!(errors[1], SbnError::Lex { position: 4, .. }));

        let errors = validate("Agent -1 female.n.02 Patient \"x\" Theme").unwrap_err();
        assert_eq!(errors.len(), 2);
    }

    #[test]
    fn forward_box_reference() {
        let g = parse("a.n.01 CONTINUATION >1 b.n.01 NEGATION <2 c.n.01").unwrap();
        assert_eq!(g.box_count(), 3);
        assert_eq!(g.relations()[0], RelationEdge { source: 1, relation: "CONTINUATION".into(), target: 2 });
        assert_eq!(g.relations()[1].target, 0);
    }

    #[test]
    fn uppercase_roles_take_values() {
        let g = parse("quantity.n.01 EQU 3 time.n.08 TSU now").unwrap();
        assert_eq!(g.roles()[0].target, RoleTarget::Number("3".into()));
        assert_eq!(g.relations().len(), 0);
    }

    #[test]
    fn multiline_is_the_same_document() {
        let multi = "female.n.02 Name \"Johanna\"\ntime.n.08 TPR now   % past\n\nsee.v.01   Experiencer -2\n           Time -1";
        let single = "female.n.02 Name \"Johanna\" time.n.08 TPR now see.v.01 Experiencer -2 Time -1";
        assert_eq!(parse(multi).unwrap(), parse(single).unwrap());
        assert_eq!(serialize(&parse(multi).unwrap()), single);
    }
}
