use super::matcher::{for_each_completion, for_each_match, head_vars, instantiate, Db};
use super::AnalysisError;
use crate::forl::rules::Head;
use crate::forl::TypedSpec;
use crate::relational::{eval_formula, Bounds, TupleSet};

/// Least fixpoint of the rule-form facts among `facts` over `bounds`,
/// checked against the remaining constraints.
pub(crate) fn least_fixpoint(spec: &TypedSpec, bounds: &Bounds, facts: &[usize]) -> Result<Vec<TupleSet>, AnalysisError> {
    let n = bounds.universe.len();
    let mut derive = Vec::new();
    let mut constraints = Vec::new();
    let mut general = Vec::new();
    for &i in facts {
        match &spec.facts[i].rules {
            Some(rules) => {
                for r in rules {
                    if matches!(r.head, Head::Atom(_)) {
                        derive.push((i, r));
                    } else {
                        constraints.push((i, r));
                    }
                }
            }
            None => general.push(i),
        }
    }

    let mut db = Db::from_values(&bounds.lower);
    let mut delta = Db::from_values(&bounds.lower);
    let mut escaped: Vec<usize> = Vec::new();
    let mut first = true;
    loop {
        let mut next = Db::empty(bounds.lower.iter().map(TupleSet::arity));
        let mut grew = false;
        for &(fi, rule) in &derive {
            let Head::Atom(head) = &rule.head else { unreachable!() };
            let hv = head_vars(&rule.head);
            let mut emit = |binding: &[Option<u32>]| {
                for_each_completion(binding, &hv, n, &mut |total| {
                    let t = instantiate(head, total);
                    if db.contains(head.rel, &t) || next.contains(head.rel, &t) {
                        return;
                    }
                    if !bounds.upper[head.rel].contains(&t) {
                        if !escaped.contains(&fi) {
                            escaped.push(fi);
                        }
                        return;
                    }
                    next.tables[head.rel].insert(t);
                    grew = true;
                });
            };
            if rule.body.is_empty() {
                if first {
                    for_each_match(rule, &db, None, &mut emit);
                }
                continue;
            }
            for i in 0..rule.body.len() {
                for_each_match(rule, &db, Some((i, &delta)), &mut emit);
            }
        }
        first = false;
        if !grew {
            break;
        }
        for (r, table) in next.tables.iter().enumerate() {
            for t in table.iter() {
                db.tables[r].insert(t.clone());
            }
        }
        delta = next;
    }

    let mut values = bounds.lower.clone();
    for (r, table) in db.tables.iter().enumerate() {
        for t in table.iter() {
            values[r].insert(t.clone());
        }
    }

    let mut violated = escaped;
    for &(fi, rule) in &constraints {
        if violated.contains(&fi) {
            continue;
        }
        let hv = head_vars(&rule.head);
        let mut bad = false;
        for_each_match(rule, &db, None, &mut |binding| {
            for_each_completion(binding, &hv, n, &mut |total| {
                bad |= match &rule.head {
                    Head::Equal(x, y) => total[*x as usize] != total[*y as usize],
                    _ => true,
                };
            });
        });
        if bad {
            violated.push(fi);
        }
    }
    if !violated.is_empty() {
        violated.sort_unstable();
        return Err(AnalysisError::InconsistentPremises {
            violated: violated.iter().map(|&i| spec.facts[i].name.clone()).collect(),
        });
    }
    for i in general {
        let f = &spec.facts[i];
        let mut env = vec![0; f.num_vars()];
        if !eval_formula(&f.formula, &values, n, &mut env) {
            return Err(AnalysisError::NonHornFact(f.name.clone()));
        }
    }
    Ok(values)
}
