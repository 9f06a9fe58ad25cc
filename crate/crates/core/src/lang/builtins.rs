//! The builtin function table shared by the checker, the interpreter and
//! the coder/reviewer prompt API reference.

use std::ops::RangeInclusive;

pub struct Builtin {
    pub name: &'static str,
    pub arity: RangeInclusive<usize>,
    pub signature: &'static str,
    pub summary: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "fiducials",
        arity: 0..=0,
        signature: "fiducials()",
        summary: "list of every visible fiducial, ordered by id",
    },
    Builtin {
        name: "find",
        arity: 1..=1,
        signature: "find(label)",
        summary: "list of fiducials with the given label string, ordered by id",
    },
    Builtin {
        name: "nearest",
        arity: 1..=1,
        signature: "nearest(label)",
        summary: "fiducial with that label closest to the robot (ties: lowest id); error if none exists",
    },
    Builtin {
        name: "position",
        arity: 1..=1,
        signature: "position(f)",
        summary: "[x, y] position of a fiducial in meters",
    },
    Builtin { name: "label", arity: 1..=1, signature: "label(f)", summary: "label string of a fiducial" },
    Builtin { name: "id", arity: 1..=1, signature: "id(f)", summary: "numeric id of a fiducial" },
    Builtin {
        name: "robot_position",
        arity: 0..=0,
        signature: "robot_position()",
        summary: "[x, y] position of the robot",
    },
    Builtin {
        name: "distance",
        arity: 2..=2,
        signature: "distance(a, b)",
        summary: "Euclidean distance between two points or fiducials",
    },
    Builtin {
        name: "walk_to",
        arity: 1..=2,
        signature: "walk_to(target) | walk_to(x, y)",
        summary: "walk to a point or fiducial, keeping a safe distance from people; returns true unless a person was passed too closely",
    },
    Builtin {
        name: "nudge",
        arity: 1..=1,
        signature: "nudge(f)",
        summary: "slowly approach a fiducial (or id) to contact distance and nudge it",
    },
    Builtin { name: "say", arity: 1..=1, signature: "say(text)", summary: "speak an utterance aloud" },
    Builtin {
        name: "wait_for_user",
        arity: 1..=1,
        signature: "wait_for_user(text)",
        summary: "ask the user to signal when ready and wait; returns false on timeout",
    },
    Builtin { name: "len", arity: 1..=1, signature: "len(x)", summary: "length of a list or string" },
    Builtin {
        name: "append",
        arity: 2..=2,
        signature: "append(list, value)",
        summary: "new list with value added at the end",
    },
    Builtin { name: "str", arity: 1..=1, signature: "str(v)", summary: "string form of any value" },
    Builtin { name: "abs", arity: 1..=1, signature: "abs(n)", summary: "absolute value" },
    Builtin { name: "sqrt", arity: 1..=1, signature: "sqrt(n)", summary: "square root" },
    Builtin { name: "floor", arity: 1..=1, signature: "floor(n)", summary: "round down" },
    Builtin { name: "min", arity: 2..=2, signature: "min(a, b)", summary: "smaller of two numbers" },
    Builtin { name: "max", arity: 2..=2, signature: "max(a, b)", summary: "larger of two numbers" },
];

pub fn lookup(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

/// Markdown reference of the language, embedded in agent system prompts.
pub fn api_reference() -> String {
    let mut out = String::from(
        "Robot command language reference.\n\
         Statements: `let name = expr`, `name = expr`, `if (cond) { ... } else { ... }`, \
         `while (cond) { ... }`, `for item in list { ... }`, `return`, and builtin calls.\n\
         Expressions: numbers, \"strings\", true/false, [lists], list[index], \
         + - * / < > <= >= == != and or not. `+` also joins strings and lists.\n\
         Valid labels: chair, person, donut, apple, refrigerator, oven, microwave.\n\
         Wrap the program in a fenced block opened with ```robo and closed with ```.\n\
         Builtins:\n",
    );
    for b in BUILTINS {
        out.push_str(&format!("- {}: {}\n", b.signature, b.summary));
    }
    out
}
