//! Shared test support: generators, independent oracles and the invariant
//! registry used by both the per-module suites and the acceptance run.

#![allow(dead_code)]

pub mod gen;
pub mod invariants;

/// One `#[test]` per named invariant, each over `CASES` inputs.
#[allow(unused_macros)]
macro_rules! invariant_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = common::invariants::$name(common::invariants::CASES) {
                    panic!("{e}");
                }
            }
        )*
    };
}
