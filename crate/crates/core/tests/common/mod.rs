#![allow(dead_code)]

use modalrel::harness::{gen_model, GenParams, QueryGenerator, Shape};
use modalrel::kripke::KripkeModel;
use modalrel::syntax::ModalQuery;

pub fn params() -> GenParams {
    GenParams::default()
}

pub fn model(seed: u64) -> KripkeModel {
    let p = params();
    gen_model(&p, &mut p.case_rng(seed))
}

pub fn model_and_query(seed: u64, depth: usize, root: Option<Shape>) -> (KripkeModel, ModalQuery) {
    let p = params();
    let mut rng = p.case_rng(seed);
    let m = gen_model(&p, &mut rng);
    let q = QueryGenerator::new(&p, &m).query(&mut rng, depth, root);
    (m, q)
}
