//! Bundled algebras used by tests and the `example` command.

use crate::field::PrimeField;
use crate::prelie::PreLieAlgebra;

/// Five-dimensional one-generator algebra with strong chain dims 5,4,3,2,2,1,0.
pub fn ex31(field: PrimeField) -> PreLieAlgebra {
    let m1 = field.p() as i64 - 1;
    PreLieAlgebra::from_products(
        field,
        5,
        &[
            (0, 0, vec![0, 1, 0, 0, 0]),
            (0, 3, vec![0, 0, 0, 0, 1]),
            (1, 0, vec![0, 0, 1, 0, 0]),
            (1, 2, vec![0, 0, 0, 1, 0]),
            (2, 2, vec![0, 0, 0, 0, m1]),
            (3, 0, vec![0, 0, 0, 0, 1]),
        ],
    )
    .and_then(|a| a.with_names((1..=5).map(|i| format!("a{i}")).collect()))
    .expect("fixture is well formed")
}

/// Two-dimensional algebra with `x·x = y` and all other products zero.
pub fn dim2(field: PrimeField) -> PreLieAlgebra {
    PreLieAlgebra::from_products(field, 2, &[(0, 0, vec![0, 1])])
        .and_then(|a| a.with_names(vec!["x".into(), "y".into()]))
        .expect("fixture is well formed")
}

pub fn by_name(name: &str, field: PrimeField) -> Option<PreLieAlgebra> {
    match name {
        "ex31" => Some(ex31(field)),
        "dim2" => Some(dim2(field)),
        _ => None,
    }
}
