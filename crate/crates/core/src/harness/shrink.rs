use crate::kripke::{KripkeModel, ModelFile};
use crate::syntax::{free_vars, Formula, ModalQuery};

fn models_without_a_state(file: &ModelFile) -> Vec<ModelFile> {
    if file.states.len() < 2 {
        return Vec::new();
    }
    (0..file.states.len())
        .map(|i| {
            let mut f = file.clone();
            let gone = f.states.remove(i);
            let id = &gone[crate::kripke::ID_CONCEPT];
            for pairs in f.relations.values_mut() {
                pairs.retain(|[a, b]| a != id && b != id);
            }
            f
        })
        .collect()
}

fn models_without_an_edge(file: &ModelFile) -> Vec<ModelFile> {
    let mut out = Vec::new();
    for (name, pairs) in &file.relations {
        for i in 0..pairs.len() {
            let mut f = file.clone();
            f.relations.get_mut(name).expect("present").remove(i);
            out.push(f);
        }
    }
    out
}

fn children(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Eq(..) | Formula::Neq(..) => vec![],
        Formula::Not(g)
        | Formula::Diamond(_, g)
        | Formula::Box(_, g)
        | Formula::Exists(_, g)
        | Formula::Forall(_, g)
        | Formula::Abstraction { body: g, .. } => vec![g],
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
    }
}

fn rebuild(f: &Formula, kids: Vec<Formula>) -> Formula {
    let mut kids = kids.into_iter();
    let mut next = || kids.next().expect("arity matches");
    match f {
        Formula::Eq(..) | Formula::Neq(..) => f.clone(),
        Formula::Not(_) => Formula::not(next()),
        Formula::Diamond(r, _) => Formula::diamond(r, next()),
        Formula::Box(r, _) => Formula::boxed(r, next()),
        Formula::Exists(v, _) => Formula::exists(v.clone(), next()),
        Formula::Forall(v, _) => Formula::forall(v.clone(), next()),
        Formula::Abstraction { var, arg, .. } => Formula::abstraction(var.clone(), next(), arg.clone()),
        Formula::And(..) => {
            let a = next();
            Formula::and(a, next())
        }
        Formula::Or(..) => {
            let a = next();
            Formula::or(a, next())
        }
        Formula::Implies(..) => {
            let a = next();
            Formula::implies(a, next())
        }
    }
}

/// Every formula obtained by replacing one subformula with one of its
/// children, outermost first.
fn hoists(f: &Formula) -> Vec<Formula> {
    let kids = children(f);
    let mut out: Vec<Formula> = kids.iter().map(|k| (*k).clone()).collect();
    for (i, k) in kids.iter().enumerate() {
        for smaller in hoists(k) {
            let mut replaced: Vec<Formula> = kids.iter().map(|k| (*k).clone()).collect();
            replaced[i] = smaller;
            out.push(rebuild(f, replaced));
        }
    }
    out
}

fn queries_smaller(q: &ModalQuery) -> Vec<ModalQuery> {
    hoists(&q.formula)
        .into_iter()
        .filter_map(|f| {
            let free = free_vars(&f);
            if !free.iter().all(|v| q.targets.contains(v)) {
                return None;
            }
            let targets = q.targets.iter().filter(|v| free.contains(v)).cloned().collect();
            ModalQuery::new(f, targets).ok()
        })
        .collect()
}

/// Greedy minimisation: drop states, then edges, then formula subtrees,
/// keeping each step only if `fails` still holds. Repeats to a fixed point.
pub fn shrink(
    model: &KripkeModel,
    query: &ModalQuery,
    fails: impl Fn(&KripkeModel, &ModalQuery) -> bool,
) -> (KripkeModel, ModalQuery) {
    let mut file = model.to_file();
    let mut model = model.clone();
    let mut query = query.clone();
    loop {
        let mut progressed = false;
        for step in [
            models_without_a_state as fn(&ModelFile) -> Vec<ModelFile>,
            models_without_an_edge,
        ] {
            'retry: loop {
                for candidate in step(&file) {
                    if let Ok(m) = KripkeModel::from_file(&candidate) {
                        if fails(&m, &query) {
                            file = candidate;
                            model = m;
                            progressed = true;
                            continue 'retry;
                        }
                    }
                }
                break;
            }
        }
        'formula: loop {
            for candidate in queries_smaller(&query) {
                if fails(&model, &candidate) {
                    query = candidate;
                    progressed = true;
                    continue 'formula;
                }
            }
            break;
        }
        if !progressed {
            return (model, query);
        }
    }
}
