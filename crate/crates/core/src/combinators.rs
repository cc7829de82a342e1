//! Standard lambda terms used throughout the tests and examples.

use crate::term::{mk_abs, mk_app, mk_var, DiffSum};

/// I = \x.x
pub fn i() -> DiffSum {
    mk_abs("x", mk_var("x"))
}

/// Delta = \x.x x
pub fn delta() -> DiffSum {
    mk_abs("x", mk_app(mk_var("x"), mk_var("x")))
}

/// Omega = Delta Delta
pub fn omega() -> DiffSum {
    mk_app(delta(), delta())
}

/// Y = \f.(\x.f (x x))(\x.f (x x))
pub fn y() -> DiffSum {
    let half = mk_abs("x", mk_app(mk_var("f"), mk_app(mk_var("x"), mk_var("x"))));
    mk_abs("f", mk_app(half.clone(), half))
}

/// Successor on Church numerals: \n x y.n x (x y)
pub fn successor() -> DiffSum {
    mk_abs(
        "n",
        mk_abs(
            "x",
            mk_abs(
                "y",
                mk_app(
                    mk_app(mk_var("n"), mk_var("x")),
                    mk_app(mk_var("x"), mk_var("y")),
                ),
            ),
        ),
    )
}

/// The n-th Church numeral \s x.s^n(x).
pub fn church(n: u32) -> DiffSum {
    let mut body = mk_var("x");
    for _ in 0..n {
        body = mk_app(mk_var("s"), body);
    }
    mk_abs("s", mk_abs("x", body))
}
