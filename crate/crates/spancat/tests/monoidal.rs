use spancat::monoidal::{
    gamma_agreement_check, gamma_op_truncated, lax_monoidal_corpus, mon_cat_to_gamma_diagram, monoidal_posets,
    segal_condition_check, LaxMonFunctor,
};

fn commutative(g: &LaxMonFunctor) -> bool {
    g.source.is_commutative() && g.target.is_commutative()
}

fn size(g: &LaxMonFunctor) -> usize {
    g.source.carrier.num_objects().max(g.target.carrier.num_objects())
}

#[test]
fn encodings_satisfy_the_segal_condition() {
    let gamma = gamma_op_truncated(3);
    for m in monoidal_posets(2).iter().filter(|m| m.is_commutative()) {
        let d = mon_cat_to_gamma_diagram(m, &gamma).unwrap();
        let v = segal_condition_check(&gamma, &d);
        assert!(v.passed, "{:?}", v.witness);
    }
}

#[test]
fn collage_mates_reproduce_the_oplax_structure() {
    let corpus = lax_monoidal_corpus(3).unwrap();
    let (gamma2, gamma3) = (gamma_op_truncated(2), gamma_op_truncated(3));
    let mut checked = [0, 0];
    for (g, adj) in corpus.iter().filter(|(g, _)| commutative(g)) {
        let v = gamma_agreement_check(g, adj, &gamma2).unwrap();
        assert!(v.passed, "N = 2: {:?}", v.witness);
        checked[0] += 1;
        if size(g) <= 2 {
            let v = gamma_agreement_check(g, adj, &gamma3).unwrap();
            assert!(v.passed, "N = 3: {:?}", v.witness);
            checked[1] += 1;
        }
    }
    assert!(checked[0] > checked[1] && checked[1] > 0, "{checked:?}");
}
