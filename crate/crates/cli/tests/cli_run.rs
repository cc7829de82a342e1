//! Exit-code contract of the command dispatcher: 0 success/Equal,
//! 1 NotEqual, 2 Unknown/fuel-exhausted/clipped, 64 parse or usage error.

use clap::Parser;
use dlam_cli::Cli;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["dlam"];
    argv.extend_from_slice(args);
    match Cli::try_parse_from(argv) {
        Ok(cli) => dlam_cli::run(&cli),
        Err(_) => 64,
    }
}

#[test]
fn equal_is_zero() {
    assert_eq!(
        run(&["eq", "--fuel", "200", "D(\\x.x x; y) z", "y z + D(z; y) z"]),
        0
    );
    assert_eq!(run(&["parse", "x y"]), 0);
    assert_eq!(run(&["reduce", "(\\x.x) z"]), 0);
    assert_eq!(run(&["translate", "--to", "res", "x y"]), 0);
    assert_eq!(
        run(&["taylor-eq", "--degree", "1", "\\x.(\\y.y) x", "\\x.x"]),
        0
    );
    assert_eq!(
        run(&[
            "interp",
            "--vars",
            "",
            "--size",
            "6",
            "--witness",
            "12",
            "(\\x.x x)(\\x.x x)"
        ]),
        0
    );
}

#[test]
fn not_equal_is_one() {
    assert_eq!(run(&["eq", "x", "y"]), 1);
    assert_eq!(run(&["taylor-eq", "x", "y"]), 1);
    assert_eq!(
        run(&[
            "interp-eq",
            "--vars",
            "x,y",
            "--size",
            "4",
            "--witness",
            "8",
            "x",
            "y"
        ]),
        1
    );
}

#[test]
fn unknown_is_two() {
    assert_eq!(run(&["eq", "--fuel", "40", "(\\x.x x)(\\x.x x)", "0"]), 2);
    assert_eq!(run(&["reduce", "--fuel", "10", "(\\x.x x)(\\x.x x)"]), 2);
}

#[test]
fn parse_and_usage_errors_are_sixty_four() {
    assert_eq!(run(&["parse", "x $"]), 64);
    assert_eq!(run(&["parse", "\\x."]), 64);
    assert_eq!(run(&["parse", "--calculus", "res", "x["]), 64);
    // inadequate variable list
    assert_eq!(run(&["interp", "--vars", "", "x"]), 64);
    // malformed let binding
    assert_eq!(run(&["--let", "nonsense", "parse", "x"]), 64);
    // unknown flag
    assert_eq!(run(&["parse", "--no-such-flag", "x"]), 64);
}

#[test]
fn axiom_report_passes() {
    assert_eq!(run(&["axioms", "--trials", "25", "--seed", "3"]), 0);
}
