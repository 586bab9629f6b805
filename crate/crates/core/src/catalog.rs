//! Seeds shipped with the workspace.

use crate::seed::Seed;

pub const A2: &str = include_str!("../../../seeds/A2.json");
pub const A3: &str = include_str!("../../../seeds/A3.json");
pub const B2: &str = include_str!("../../../seeds/B2.json");
pub const KRONECKER: &str = include_str!("../../../seeds/kronecker.json");
pub const EXAMPLE4: &str = include_str!("../../../seeds/example4.json");

fn load(s: &str) -> Seed {
    Seed::from_json_str(s).expect("bundled seed is valid")
}

pub fn a2() -> Seed {
    load(A2)
}

pub fn a3() -> Seed {
    load(A3)
}

/// Rank 2 with symmetrizers `(1, 2)`, no quantum form.
pub fn b2() -> Seed {
    load(B2)
}

pub fn kronecker() -> Seed {
    load(KRONECKER)
}

/// One unfrozen and one frozen vertex, `p*(e_1) = (0, 1)`.
pub fn example4() -> Seed {
    load(EXAMPLE4)
}

/// Looks up a bundled seed by name.
pub fn by_name(name: &str) -> Option<Seed> {
    match name.to_ascii_lowercase().as_str() {
        "a2" => Some(a2()),
        "a3" => Some(a3()),
        "b2" => Some(b2()),
        "kronecker" => Some(kronecker()),
        "example4" => Some(example4()),
        _ => None,
    }
}
