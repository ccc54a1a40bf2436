//! Subcommand implementations. Each returns a [`Report`].

use std::ops::ControlFlow;

use fmtlab_core::cores::{core, quotient_poset};
use fmtlab_core::enumerate::structures_up_to_iso;
use fmtlab_core::gaifman::{gaifman_graph, neighborhood, tree_depth_over};
use fmtlab_core::games::{k_core_bounded, k_extendable, k_hom, lemma29_check, EfGame};
use fmtlab_core::homotopy::{
    classify_morphism, find_lift, homotopic, homotopy_category, is_weak_k_equivalence,
    theorem3_verify, LiftingProblem,
};
use fmtlab_core::homsearch::{find_retraction, HomOutcome, HomSearch, SearchBudget};
use fmtlab_core::locality::{gaifman_check, hanf_check, weakly_local_premise, Equiv};
use fmtlab_core::logic::{
    canonical_sentence, canonical_structure, enumerate_pp_tests, evaluate, preserves_pp, Assignment,
};
use fmtlab_core::report::Report;
use fmtlab_core::structures::{coequalizer, coproduct, equalizer, expand, free_term_structure, product, top};
use fmtlab_core::sweep::{run_sweep, Check, SweepConfig};
use fmtlab_core::{Error, Morphism, Result, Structure};
use serde_json::{json, Value};

use crate::input;
use crate::Command;

fn doc(s: &Structure) -> Value {
    serde_json::to_value(s.to_doc()).expect("structure serializes")
}

fn map_value(m: &Morphism) -> Value {
    json!(m.to_names())
}

fn map_of(a: &Structure, b: &Structure, map: &[usize]) -> Value {
    let pairs: serde_json::Map<String, Value> =
        map.iter().enumerate().map(|(x, &y)| (a.name(x).to_string(), json!(b.name(y)))).collect();
    Value::Object(pairs)
}

fn over_names(over: &Option<String>) -> Vec<String> {
    input::names(over.as_deref().unwrap_or(""))
}

fn pool(a: &Structure, cap: usize) -> Result<Vec<Structure>> {
    structures_up_to_iso(a.vocab(), cap)
}

/// Text rendering: structure-valued verdicts are printed as documents.
pub fn render_text(report: &Report) -> String {
    match &report.verdict {
        Value::Object(_) | Value::Array(_) => {
            format!("{}\n", serde_json::to_string_pretty(&report.verdict).expect("json"))
        }
        _ => report.to_text(),
    }
}

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Validate { a } => {
            let s = input::structure(a)?;
            Ok(Report::new("validate", doc(&s)).detail("size", s.size()).detail("tuples", s.tuple_count()))
        }
        Command::Product { a, b } => {
            let p = product(&input::structure(a)?, &input::structure(b)?)?;
            Ok(Report::new("product", doc(&p.structure)))
        }
        Command::Coproduct { a, b } => {
            let c = coproduct(&input::structure(a)?, &input::structure(b)?)?;
            Ok(Report::new("coproduct", doc(&c.structure)))
        }
        Command::Equalizer { f, g } => {
            let e = equalizer(&input::morphism(f)?, &input::morphism(g)?)?;
            Ok(Report::new("equalizer", doc(&e.structure)).with_witness(map_value(&e.inclusion)))
        }
        Command::Coequalizer { f, g } => {
            let q = coequalizer(&input::morphism(f)?, &input::morphism(g)?)?;
            Ok(Report::new("coequalizer", doc(&q.structure)).with_witness(map_value(&q.quotient)))
        }
        Command::FreeTerm { vocab } => Ok(Report::new("free-term", doc(&free_term_structure(&input::vocabulary(vocab)?)))),
        Command::Top { vocab } => Ok(Report::new("top", doc(&top(&input::vocabulary(vocab)?)))),
        Command::Expand { a, tuple } => {
            let s = input::structure(a)?;
            Ok(Report::new("expand", doc(&expand(&s, &input::indices(&s, Some(tuple))?)?)))
        }
        Command::Gaifman { a } => {
            let s = input::structure(a)?;
            let g = gaifman_graph(&s);
            let edges: Vec<[&str; 2]> =
                g.edges().into_iter().map(|(x, y)| [g.labels()[x].as_str(), g.labels()[y].as_str()]).collect();
            Ok(Report::new("gaifman", json!({"edges": edges, "vertices": g.labels()})))
        }
        Command::Neighborhood { a, radius, tuple } => {
            let s = input::structure(a)?;
            let n = neighborhood(&s, &input::indices(&s, Some(tuple))?, *radius)?;
            Ok(Report::new("neighborhood", doc(&n)).bound("radius", *radius))
        }
        Command::Treedepth { a, over } => {
            let s = input::structure(a)?;
            let td = tree_depth_over(&s, &input::indices(&s, over.as_deref())?)?;
            Ok(Report::new("treedepth", td))
        }
        Command::Hom { a, b, pin, surjective, injective, all, budget } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let pins: Vec<(usize, usize)> = input::pairs(pin.as_deref().unwrap_or(""))?
                .iter()
                .map(|(x, y)| Ok((sa.require_index(x)?, sb.require_index(y)?)))
                .collect::<Result<_>>()?;
            let mut search = HomSearch::new(&sa, &sb)?.pins(&pins).budget(SearchBudget::nodes(budget.node_limit));
            if *surjective {
                search = search.surjective();
            }
            if *injective {
                search = search.injective();
            }
            let report = Report::new("hom", false).bound("node_limit", budget.node_limit);
            if *all {
                let mut maps = Vec::new();
                search.for_each(|m| {
                    maps.push(map_of(&sa, &sb, m));
                    ControlFlow::Continue(())
                })?;
                let found = !maps.is_empty();
                let mut r = report.detail("count", maps.len()).with_witness(Value::Array(maps));
                r.verdict = json!(found);
                return Ok(r);
            }
            match search.first() {
                HomOutcome::Found(m) => {
                    let mut r = report.with_witness(map_value(&m));
                    r.verdict = json!(true);
                    Ok(r)
                }
                HomOutcome::Absent => Ok(report),
                HomOutcome::Exhausted { nodes } => Err(Error::BudgetExceeded { nodes }),
            }
        }
        Command::Retract { a, onto, budget } => {
            let s = input::structure(a)?;
            let onto = input::indices(&s, Some(onto))?;
            let report = Report::new("retract", false).bound("node_limit", budget.node_limit);
            match find_retraction(&s, &onto, SearchBudget::nodes(budget.node_limit))?.into_result()? {
                Some(r) => {
                    let mut rep = report.with_witness(map_value(&r));
                    rep.verdict = json!(true);
                    Ok(rep)
                }
                None => Ok(report),
            }
        }
        Command::Core { a, over } => {
            let s = input::structure(a)?;
            let c = core(&s, &input::indices(&s, over.as_deref())?)?;
            Ok(Report::new("core", doc(&c.structure)).with_witness(map_value(&c.retraction)))
        }
        Command::Poset { dir, over } => {
            let (labels, structures) = input::directory(dir)?;
            let p = quotient_poset(&structures, &over_names(over))?;
            Ok(Report::new("poset", p.to_value(&labels)).detail("structures", structures.len()))
        }
        Command::Eval { a, formula, assign } => {
            let s = input::structure(a)?;
            let f = input::formula(formula, Some(s.vocab()))?;
            let mut env = Assignment::new();
            for (var, elem) in input::pairs(assign.as_deref().unwrap_or(""))? {
                env.insert(var, s.require_index(&elem)?);
            }
            Ok(Report::new("eval", evaluate(&s, &f, &env)?).detail("formula", f.to_string()))
        }
        Command::Qr { formula } => {
            let f = input::formula(formula, None)?;
            Ok(Report::new("qr", f.quantifier_rank()).detail("formula", f.to_string()))
        }
        Command::Classify { formula } => {
            let f = input::formula(formula, None)?;
            Ok(Report::new("classify", f.classify().to_string()).detail("formula", f.to_string()))
        }
        Command::CanonicalStructure { formula, vocab } => {
            let (f, v) = match vocab {
                Some(v) => {
                    let v = input::vocabulary(v)?;
                    (input::formula(formula, Some(&v))?, v)
                }
                None => {
                    let f = input::formula(formula, None)?;
                    let v = inferred_vocabulary(&f)?;
                    (f, v)
                }
            };
            Ok(Report::new("canonical-structure", doc(&canonical_structure(&f, &v)?)))
        }
        Command::CanonicalSentence { c, over } => {
            let s = input::structure(c)?;
            let f = canonical_sentence(&s, &input::indices(&s, over.as_deref())?)?;
            Ok(Report::new("canonical-sentence", f.to_string()).detail("qr", f.quantifier_rank()))
        }
        Command::PpTests { vocab, k, size_cap } => {
            let tests = enumerate_pp_tests(&input::vocabulary(vocab)?, *k, *size_cap)?;
            let sentences: Vec<String> =
                tests.iter().map(|t| canonical_sentence(t, &[]).map(|f| f.to_string())).collect::<Result<_>>()?;
            Ok(Report::new("pp-tests", tests.len())
                .with_witness(sentences)
                .bound("k", *k)
                .bound("size_cap", *size_cap))
        }
        Command::PreservesPp { a, b, k, over, size_cap } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let v = preserves_pp(&sa, &sb, *k, &over_names(over), *size_cap)?;
            Ok(Report::new("preserves-pp", v).bound("k", *k).bound("size_cap", *size_cap))
        }
        Command::Ef { a, b, k, tuple_a, tuple_b, budget } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let (ta, tb) = (input::indices(&sa, tuple_a.as_deref())?, input::indices(&sb, tuple_b.as_deref())?);
            if ta.len() != tb.len() {
                return Err(Error::Malformed("tuples must have equal length".into()));
            }
            let v = EfGame::new(&sa, &sb, SearchBudget::nodes(budget.node_limit))?.duplicator_wins(&ta, &tb, *k)?;
            Ok(Report::new("ef", v).bound("k", *k).bound("node_limit", budget.node_limit))
        }
        Command::Khom { a, b, k, over } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            Ok(Report::new("khom", k_hom(&sa, &sb, *k, &over_names(over))?).bound("k", *k))
        }
        Command::Kcore { a, k, over, pool } => {
            let s = input::structure(a)?;
            let c = k_core_bounded(&s, *k, &over_names(over), pool.pool_cap)?;
            Ok(Report::new("kcore", doc(&c)).bound("k", *k).bound("pool_cap", pool.pool_cap))
        }
        Command::Hanf { a, b, d, equiv, tuple_a, tuple_b } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let (ta, tb) = (input::indices(&sa, tuple_a.as_deref())?, input::indices(&sb, tuple_b.as_deref())?);
            let eq: Equiv = equiv.parse()?;
            let report = Report::new("hanf", false).bound("d", *d).bound("equiv", eq.to_string());
            Ok(match hanf_check(&sa, &ta, &sb, &tb, *d, eq)? {
                Some(f) => {
                    let mut r = report.with_witness(map_of(&sa, &sb, &f));
                    r.verdict = json!(true);
                    r
                }
                None => report,
            })
        }
        Command::GaifmanCheck { a, b, d, equiv, tuple_a, tuple_b } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let (ta, tb) = (input::indices(&sa, tuple_a.as_deref())?, input::indices(&sb, tuple_b.as_deref())?);
            let eq: Equiv = equiv.parse()?;
            Ok(Report::new("gaifman-check", gaifman_check(&sa, &ta, &sb, &tb, *d, eq)?)
                .bound("d", *d)
                .bound("equiv", eq.to_string()))
        }
        Command::WeakLocal { a, ta, tb, d, equiv } => {
            let s = input::structure(a)?;
            let eq: Equiv = equiv.parse()?;
            let v = weakly_local_premise(&s, &input::indices(&s, Some(ta))?, &input::indices(&s, Some(tb))?, *d, eq)?;
            Ok(Report::new("weak-local", v).bound("d", *d).bound("equiv", eq.to_string()))
        }
        Command::Extendable { a, k, pool: p, strict_paper_reading } => {
            let s = input::structure(a)?;
            let members = pool(&s, p.pool_cap)?;
            let report = Report::new("extendable", true)
                .bound("k", *k)
                .bound("pool_cap", p.pool_cap)
                .bound("pool_size", members.len())
                .detail("strict_paper_reading", *strict_paper_reading);
            Ok(match k_extendable(&s, *k, &members, *strict_paper_reading)? {
                None => report,
                Some(fail) => {
                    let b = &members[fail.pool_index];
                    let names = |st: &Structure, xs: &[usize]| -> Vec<String> {
                        xs.iter().map(|&x| st.name(x).to_string()).collect()
                    };
                    let mut r = report.with_witness(json!({
                        "x": names(&s, &fail.x),
                        "pool_member": doc(b),
                        "y": names(b, &fail.copy),
                        "unmatched": b.name(fail.b),
                    }));
                    r.verdict = json!(false);
                    r
                }
            })
        }
        Command::Lemma29 { a, b, k, pool: p } => {
            let (sa, sb) = (input::structure(a)?, input::structure(b)?);
            let members = pool(&sa, p.pool_cap)?;
            let r = lemma29_check(&sa, &sb, *k, &members)?;
            Ok(Report::new("lemma29", !r.is_counterexample())
                .bound("k", *k)
                .bound("pool_cap", p.pool_cap)
                .detail("a_extendable", r.a_extendable)
                .detail("b_extendable", r.b_extendable)
                .detail("k_hom_equivalent", r.k_hom_equivalent)
                .detail("ef_equivalent", r.ef_equivalent)
                .detail("premise", r.premise()))
        }
        Command::Lift { i, p, f, g } => {
            let lp = LiftingProblem::new(
                input::morphism(i)?,
                input::morphism(p)?,
                input::morphism(f)?,
                input::morphism(g)?,
            )?;
            let report = Report::new("lift", false);
            Ok(match find_lift(&lp)? {
                Some(h) => {
                    let mut r = report.with_witness(map_value(&h));
                    r.verdict = json!(true);
                    r
                }
                None => report,
            })
        }
        Command::ClassifyMorphism { f } => {
            let m = input::morphism(f)?;
            let c = classify_morphism(&m)?;
            Ok(Report::new(
                "classify-morphism",
                json!({
                    "acyclic_fibration": c.acyclic_fibration,
                    "retraction": c.acyclic_fibration,
                    "section": c.section,
                    "weak_equivalence": c.weak_equivalence,
                }),
            ))
        }
        Command::Homotopic { f, g } => {
            let h = homotopic(&input::morphism(f)?, &input::morphism(g)?)?;
            Ok(Report::new("homotopic", true)
                .with_witness(json!({"cylinder": doc(&h.cylinder), "map": map_value(&h.witness)})))
        }
        Command::WeakKEquivalence { f, k } => {
            let m = input::morphism(f)?;
            Ok(Report::new("weak-k-equivalence", is_weak_k_equivalence(&m, *k)?).bound("k", *k))
        }
        Command::HomotopyCategory { dir, over } => {
            let (labels, structures) = input::directory(dir)?;
            let p = homotopy_category(&structures, &over_names(over))?;
            Ok(Report::new("homotopy-category", p.to_value(&labels)).detail("structures", structures.len()))
        }
        Command::Theorem3 { n1, n2, k, size_cap } => {
            let (a, b) = (input::structure(n1)?, input::structure(n2)?);
            let r = theorem3_verify(&a, &b, *k, *size_cap)?;
            let mut report = Report::new("theorem3", r.agrees())
                .bound("k", *k)
                .bound("size_cap", *size_cap)
                .detail("family_size", r.family_size)
                .detail("game_side", r.lhs)
                .detail("game_side_exact", true)
                .detail("pp_side", r.rhs)
                .detail("pp_side_bounded", true);
            if let Some((in_first, sentence)) = &r.separating {
                report = report.with_witness(json!({"sentence": sentence.to_string(), "true_in_first": in_first}));
            }
            Ok(report)
        }
        Command::Theorem3Sweep { vocab, max_size, k, size_cap } => {
            let mut config = SweepConfig::new(input::vocabulary(vocab)?, *max_size, (1..=*k).collect());
            if let Some(c) = size_cap {
                config.size_cap = *c;
            }
            let mut r = run_sweep(Check::Theorem3, &config)?.report(&config);
            r.command = "theorem3-sweep".into();
            Ok(r)
        }
        Command::Sweep { check, vocab, max_size, k, size_cap } => {
            let check: Check = check.parse()?;
            let ks = input::names(k)
                .iter()
                .map(|x| x.parse::<usize>().map_err(|_| Error::Malformed(format!("bad k value {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let mut config = SweepConfig::new(input::vocabulary(vocab)?, *max_size, ks);
            if let Some(c) = size_cap {
                config.size_cap = *c;
            }
            Ok(run_sweep(check, &config)?.report(&config))
        }
    }
}

/// Relations with the arities used in the formula, and no constants.
fn inferred_vocabulary(f: &fmtlab_core::logic::Formula) -> Result<fmtlab_core::Vocabulary> {
    use fmtlab_core::logic::Formula as F;
    fn walk(f: &F, out: &mut std::collections::BTreeMap<String, usize>) {
        match f {
            F::Atom { relation, args } => {
                out.insert(relation.clone(), args.len());
            }
            F::Not(x) | F::Exists(_, x) | F::Forall(_, x) => walk(x, out),
            F::And(x, y) | F::Or(x, y) | F::Implies(x, y) => {
                walk(x, out);
                walk(y, out);
            }
            F::True | F::False | F::Eq(..) => {}
        }
    }
    let mut rels = std::collections::BTreeMap::new();
    walk(f, &mut rels);
    fmtlab_core::Vocabulary::new(rels, Vec::<String>::new())
}
