use std::collections::BTreeSet;

use proptest::prelude::*;

use haiproto::catalog::{compose_patterns, diff_steps, Step};
use haiproto::dsl::{self, Decl};
use haiproto::model::{
    type_compatible, ActionDef, Arg, BaseType, Message, Modifier, OpKind, Operation, Pattern, PrimitiveKind,
    PrimitiveSpec, Role, Scenario, Tag, TypeExpr,
};
use haiproto::runtime::NearestCentroid;

const SUBTYPES: [&str; 6] = ["label", "raw_data", "fvector", "state", "action", "eval"];
const VARS: [&str; 6] = ["X", "Y", "Z", "M", "S", "CS"];

fn role() -> impl Strategy<Value = Role> {
    prop::sample::select(Role::ALL.to_vec())
}

fn base() -> impl Strategy<Value = BaseType> {
    (role(), prop::sample::subsequence(SUBTYPES.to_vec(), 0..3))
        .prop_map(|(r, subs)| BaseType::new(r, &subs))
}

fn simple_type() -> impl Strategy<Value = TypeExpr> {
    (base(), any::<bool>()).prop_map(|(b, list)| if list { TypeExpr::List(b) } else { TypeExpr::Base(b) })
}

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec("[a-z]{1,6}", 1..4).prop_map(|w| w.join(" "))
}

fn action(i: usize) -> impl Strategy<Value = ActionDef> {
    (
        prop::sample::subsequence(VARS.to_vec(), 1..=4),
        prop::collection::vec(simple_type(), 4),
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec((prop::sample::select(vec![OpKind::Select, OpKind::Map, OpKind::Modify, OpKind::Create]), any::<u64>()), 0..3),
        any::<u64>(),
        prop::option::of(words()),
        "[a-z]{1,6}",
    )
        .prop_map(move |(vars, types, request, group, ops, shuffle, doc, stem)| {
            let typed: Vec<(&str, TypeExpr)> = vars.iter().copied().zip(types).collect();
            let (head, rest) = if group && typed.len() >= 2 {
                (Arg::group(typed[..2].to_vec()), &typed[2..])
            } else {
                (Arg::named(typed[0].0, typed[0].1.clone()), &typed[1..])
            };
            let refs = rest.iter().map(|(v, t)| Arg::named(v, t.clone())).collect();
            let mut params: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
            let k = shuffle as usize % params.len();
            params.rotate_left(k);
            let operations = ops
                .into_iter()
                .map(|(kind, pick)| {
                    let (lo, hi) = kind.arity();
                    let n = (lo + pick as usize % (hi - lo + 1)).min(vars.len()).max(lo);
                    let args: Vec<&str> = (0..n).map(|k| vars[(pick as usize + k) % vars.len()]).collect();
                    Operation::new(kind, &args)
                })
                .collect();
            ActionDef {
                name: format!("act{i}-{stem}"),
                params,
                primitive: PrimitiveSpec {
                    kind: if request { PrimitiveKind::Request } else { PrimitiveKind::Provide },
                    head,
                    refs,
                },
                operations,
                doc: doc.unwrap_or_default(),
            }
        })
}

fn message(i: usize, actions: Vec<String>) -> impl Strategy<Value = Message> {
    (
        prop::sample::select(actions),
        prop::sample::subsequence(VARS.to_vec(), 1..=3),
        any::<bool>(),
        prop::collection::btree_map("[a-z]{1,5}", "[a-zA-Z \"]{0,8}", 0..2),
        "[A-Za-z]{1,8}",
    )
        .prop_map(move |(action, args, flip, free, label)| {
            let (s, r) = if flip { ("user", "model") } else { ("model", "user") };
            let mut m = Message::new(&format!("msg{i}"), s, r, &action, &args);
            if let Some(first) = args.first() {
                m.modifiers.push(Modifier::var(first, &label));
            }
            for (k, v) in free {
                if !m.modifiers.iter().any(|x| x.key == k) {
                    m.modifiers.push(Modifier::free(&k, &v));
                }
            }
            m.modifiers.sort_by(|a, b| a.key.cmp(&b.key));
            m
        })
}

fn source_file() -> impl Strategy<Value = Vec<Decl>> {
    (1usize..5, 1usize..5, 1usize..4)
        .prop_flat_map(|(na, nm, np)| {
            let actions: Vec<_> = (0..na).map(action).collect();
            (actions, Just(nm), Just(np))
        })
        .prop_flat_map(|(actions, nm, np)| {
            let names: Vec<String> = actions.iter().map(|a| a.name.clone()).collect();
            let msgs: Vec<_> = (0..nm).map(|i| message(i, names.clone())).collect();
            (Just(actions), msgs, Just(np))
        })
        .prop_flat_map(|(actions, msgs, np)| {
            let mnames: Vec<String> = msgs.iter().map(|m| m.name.clone()).collect();
            let pats: Vec<_> = (0..np)
                .map(|i| {
                    (
                        prop::collection::vec(prop::sample::select(mnames.clone()), 1..4),
                        prop::sample::subsequence(Tag::ALL.to_vec(), 0..3),
                        prop::option::of(words()),
                    )
                        .prop_map(move |(ms, tags, notes)| Pattern {
                            name: format!("pat{i}"),
                            messages: ms,
                            tags: tags.into_iter().collect(),
                            notes: notes.unwrap_or_default(),
                        })
                })
                .collect();
            (Just(actions), Just(msgs), pats, prop::option::of(words()))
        })
        .prop_map(|(actions, msgs, pats, comment)| {
            let mut decls = Vec::new();
            if let Some(c) = comment {
                decls.push(Decl::Comment(c));
            }
            decls.push(Decl::Role("supervisor".into()));
            decls.extend(actions.into_iter().map(Decl::Action));
            decls.extend(msgs.into_iter().map(Decl::Message));
            let sc = Scenario {
                name: "scn".into(),
                patterns: pats.iter().map(|p| p.name.clone()).collect(),
                notes: String::new(),
            };
            decls.extend(pats.into_iter().map(Decl::Pattern));
            decls.push(Decl::Scenario(sc));
            decls
        })
}

fn step() -> impl Strategy<Value = Step> {
    (prop::sample::select(vec!["user", "model", "supervisor"]), 0usize..2, prop::sample::select(vec!["a", "b", "c"]))
        .prop_map(|(s, r, a)| {
            let others: Vec<&str> = ["user", "model", "supervisor"].into_iter().filter(|x| *x != s).collect();
            Step { sender: s.into(), receiver: others[r].into(), action: a.into() }
        })
}

/// Independent nearest-centroid: all minimal labels, then the smallest.
fn brute_force(points: &[(Vec<f64>, String)], x: &[f64]) -> String {
    let labels: BTreeSet<&String> = points.iter().map(|(_, l)| l).collect();
    let mut scored = Vec::new();
    for l in labels {
        let own: Vec<&Vec<f64>> = points.iter().filter(|(_, m)| m == l).map(|(p, _)| p).collect();
        let c: Vec<f64> = (0..x.len()).map(|d| own.iter().map(|p| p[d]).sum::<f64>() / own.len() as f64).collect();
        scored.push((c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), l.clone()));
    }
    let min = scored.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
    scored.into_iter().filter(|(d, _)| *d == min).map(|(_, l)| l).min().unwrap()
}

fn grid_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-8i32..=40).prop_map(|v| v as f64 / 4.0), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_files_round_trip(decls in source_file()) {
        let file = dsl::SourceFile { path: "gen.hai".into(), decls, spans: Vec::new() };
        let text = dsl::print(&file);
        let parsed = dsl::parse(&text).map_err(|d| TestCaseError::fail(format!("{}\n{text}", d[0])))?;
        prop_assert_eq!(&parsed.decls, &file.decls, "{}", text);
        prop_assert_eq!(dsl::print(&parsed), text);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = dsl::parse(&text);
    }

    #[test]
    fn parser_never_panics_on_dsl_shaped_text(text in "[a-zA-Z_\\-:=<>()\\[\\],;.|@/ \"\n]{0,200}") {
        if let Ok(f) = dsl::parse(&text) {
            let again = dsl::parse(&dsl::print(&f)).expect("printed output parses");
            prop_assert_eq!(again.decls, f.decls);
        }
    }

    #[test]
    fn compatibility_is_reflexive_and_symmetric(a in simple_type(), b in simple_type()) {
        prop_assert!(type_compatible(&a, &a));
        prop_assert_eq!(type_compatible(&a, &b), type_compatible(&b, &a));
    }

    #[test]
    fn wildcards_absorb_their_role(b in base()) {
        let w = BaseType::wildcard(b.role);
        prop_assert!(w.compatible(&b));
        prop_assert!(type_compatible(&TypeExpr::List(w.clone()), &TypeExpr::List(b.clone())));
        for other in Role::ALL.into_iter().filter(|r| *r != b.role) {
            prop_assert!(!BaseType::wildcard(other).compatible(&b));
        }
    }

    #[test]
    fn narrowing_exists_iff_compatible(a in simple_type(), b in simple_type()) {
        let n = a.narrow(&b);
        prop_assert_eq!(n.is_some(), type_compatible(&a, &b));
        if let Some(n) = n {
            prop_assert!(type_compatible(&n, &a) && type_compatible(&n, &b));
        }
    }

    #[test]
    fn diff_is_antisymmetric(a in prop::collection::vec(step(), 0..8), b in prop::collection::vec(step(), 0..8)) {
        let ab = diff_steps(&a, &b);
        prop_assert_eq!(diff_steps(&b, &a), ab.swapped());
        let accounted = ab.shared.len() + ab.only_in_a.len() + ab.direction_changes.len();
        prop_assert_eq!(accounted, a.len());
        prop_assert!(diff_steps(&a, &a).is_empty());
    }

    #[test]
    fn compose_is_associative(
        p in prop::collection::vec("[a-z]{1,3}", 0..4),
        q in prop::collection::vec("[a-z]{1,3}", 0..4),
        r in prop::collection::vec("[a-z]{1,3}", 0..4),
    ) {
        let mk = |name: &str, ms: &[String]| Pattern {
            name: name.into(),
            messages: ms.to_vec(),
            tags: [Tag::Hi].into_iter().collect(),
            notes: String::new(),
        };
        let (p, q, r) = (mk("p", &p), mk("q", &q), mk("r", &r));
        let left = compose_patterns(&[&compose_patterns(&[&p, &q]), &r]);
        let right = compose_patterns(&[&p, &compose_patterns(&[&q, &r])]);
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, compose_patterns(&[&p, &q, &r]));
    }

    #[test]
    fn classifier_matches_brute_force(
        data in prop::collection::vec((grid_point(), prop::sample::select(vec!["a", "b", "c", "d"])), 1..12),
        queries in prop::collection::vec(grid_point(), 1..20),
    ) {
        let points: Vec<(Vec<f64>, String)> = data.into_iter().map(|(p, l)| (p, l.to_string())).collect();
        let model = NearestCentroid::new(points.clone());
        for x in queries.iter().chain(points.iter().map(|(p, _)| p)) {
            prop_assert_eq!(model.classify(x).unwrap(), brute_force(&points, x));
        }
    }

    #[test]
    fn strictly_nearest_examples_keep_their_label(
        data in prop::collection::vec((grid_point(), prop::sample::select(vec!["a", "b", "c"])), 1..12),
    ) {
        let points: Vec<(Vec<f64>, String)> = data.into_iter().map(|(p, l)| (p, l.to_string())).collect();
        let model = NearestCentroid::new(points.clone());
        let centroids = model.centroids();
        for (x, label) in &points {
            let d = |c: &Vec<f64>| c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let own = d(&centroids[label.as_str()]);
            if centroids.iter().all(|(l, c)| *l == label.as_str() || d(c) > own) {
                prop_assert_eq!(&model.classify(x).unwrap(), label);
            }
        }
    }
}
