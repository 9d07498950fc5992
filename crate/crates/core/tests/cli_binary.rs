use std::process::Command;

fn mvdelta(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mvdelta")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes_follow_the_verdict() {
    assert_eq!(mvdelta(&["check", "oplus(half(x),half(x)) = x"]), (0, "Valid\n".into()));
    assert_eq!(mvdelta(&["check", "oplus(x,x) = x"]), (1, "Counterexample: x=1/2 (lhs=1, rhs=1/2)\n".into()));
    assert_eq!(mvdelta(&["check", "oplus(x,x) ="]).0, 2);
    assert_eq!(mvdelta(&["spectrum", "--algebra", "prod(chain:2,chain:3)"]).0, 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["check", "x <= half(x)", "--sample-only", "--seed", "11", "--trials", "50"];
    assert_eq!(mvdelta(&args), mvdelta(&args));
    let args = ["spectrum", "--algebra", "prod(chain:1,chain:2,chain:2)", "--json"];
    assert_eq!(mvdelta(&args), mvdelta(&args));
}
