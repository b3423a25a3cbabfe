//! The bundled files and the notation they were written from.

use std::path::{Path, PathBuf};

pub const PROGRAMS: &[(&str, &str)] = &[
    ("01_hello", r#"A@20,20 "hello": print("hello"); print("world")"#),
    ("02_repeat", r#"A@20,20: repeat(3){ print("hi") }"#),
    (
        "03_countdown",
        r#"A@20,20 "countdown": set_var(VAR="n", 3); repeat(3){ print($n); set_var(VAR="n", arithmetic(OP="-", $n, 1)) }; print("liftoff")"#,
    ),
    ("04_nested_loops", r#"A@20,20: repeat(2){ repeat(3){ print("*") }; print("-") }"#),
    (
        "05_if_else",
        r#"A@20,20: set_var(VAR="x", 5); if(compare(OP=">", $x, 3)){ print("big") | print("small") }; if(compare(OP="<", $x, 3)){ print("tiny") | print("not tiny") }"#,
    ),
    (
        "06_arithmetic",
        r#"A@20,20: set_var(VAR="a", 7); set_var(VAR="b", 2); print(arithmetic(OP="*", $a, $b)); print(arithmetic(OP="/", $a, $b)); print(arithmetic(OP="-", $a, $b)); print(arithmetic(OP="+", $a, $b))"#,
    ),
    (
        "07_logic",
        r#"A@20,20: print(logic(OP="and", true, false)); print(logic(OP="not", false)); print(logic(OP="or", compare(OP="=", 1, 1), false))"#,
    ),
    (
        "08_sum_two_stacks",
        "A@20,20 \"sum\": set_var(VAR=\"total\", 0); set_var(VAR=\"i\", 1); repeat(4){ set_var(VAR=\"total\", arithmetic(OP=\"+\", $total, $i)); set_var(VAR=\"i\", arithmetic(OP=\"+\", $i, 1)) }\nB@300,20 \"report\": print(\"total\"); print($total)",
    ),
    ("09_step_limit", r#"A@20,20: repeat(1000000000){ print("x") }"#),
    ("10_empty_slot", r#"A@20,20: print("ok"); print"#),
];

pub const DEMOS: &[(&str, &str)] = &[
    (
        "two_stacks",
        "A@20,20 \"greeting\": repeat(10){ print(\"hi\") }; print(\"bye\")\nB@320,20: set_var(VAR=\"x\", 2); print(arithmetic(OP=\"*\", $x, 3))",
    ),
    (
        "classroom",
        "A@20,20 \"main\": set_var(VAR=\"score\", 7) !\"starting score\"; if(compare(OP=\">\", $score, 5)){ print(\"pass\") | print(\"try again\") }\nB@320,20: repeat(3){ print($score) }\nC@20,300: number(NUM=42)",
    ),
];

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn program_path(name: &str) -> PathBuf {
    root().join("programs").join(format!("{name}.bws.json"))
}

pub fn demo_path(name: &str) -> PathBuf {
    root().join("demos").join(format!("{name}.bws.json"))
}

/// Every bundled canonical workspace file.
pub fn bundled_files() -> Vec<PathBuf> {
    PROGRAMS
        .iter()
        .map(|(n, _)| program_path(n))
        .chain(DEMOS.iter().map(|(n, _)| demo_path(n)))
        .collect()
}
