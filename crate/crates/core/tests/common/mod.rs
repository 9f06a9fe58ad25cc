//! Program generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robobench::lang::ast::{BinaryOp, Expr, ExprKind, Literal, Span, Stmt, StmtKind, UnaryOp, KEYWORDS};
use robobench::lang::{Program, BUILTINS};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn fixture_programs() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixture("programs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Arbitrary syntax trees (no attention to meaning), for printer/parser tests.

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, Span::default())
}

fn s(kind: StmtKind) -> Stmt {
    Stmt::new(kind, Span::default())
}

fn ident(rng: &mut ChaCha8Rng) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyz_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz_0123456789";
    loop {
        let mut name = String::new();
        name.push(*FIRST.choose(rng).unwrap() as char);
        for _ in 0..rng.gen_range(0..6) {
            name.push(*REST.choose(rng).unwrap() as char);
        }
        if !KEYWORDS.contains(&name.as_str()) {
            return name;
        }
    }
}

fn number(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => f64::from(rng.gen_range(0u32..1000)),
        1 => f64::from(rng.gen_range(0u32..64)) / 8.0,
        2 => rng.gen_range(0.0..1e6),
        _ => {
            // arbitrary finite, non-negative bit patterns
            loop {
                let v = f64::from_bits(rng.gen::<u64>() >> 1);
                if v.is_finite() {
                    return v;
                }
            }
        }
    }
}

fn string(rng: &mut ChaCha8Rng) -> String {
    const CHARS: &[char] = &['a', 'b', 'Z', ' ', '"', '\\', '\n', '\t', '\r', 'é', '→', '#', '{', '}', '(', '0'];
    (0..rng.gen_range(0..8)).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

pub fn arbitrary_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => e(ExprKind::Literal(Literal::Number(number(rng)))),
            1 => e(ExprKind::Literal(Literal::Str(string(rng)))),
            2 => e(ExprKind::Literal(Literal::Bool(rng.gen()))),
            _ => e(ExprKind::Var(ident(rng))),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => e(ExprKind::Binary {
            op: *BinaryOp::ALL.choose(rng).unwrap(),
            lhs: Box::new(arbitrary_expr(rng, d)),
            rhs: Box::new(arbitrary_expr(rng, d)),
        }),
        1 => e(ExprKind::Unary {
            op: if rng.gen() { UnaryOp::Not } else { UnaryOp::Neg },
            operand: Box::new(arbitrary_expr(rng, d)),
        }),
        2 => e(ExprKind::List((0..rng.gen_range(0..4)).map(|_| arbitrary_expr(rng, d)).collect())),
        3 => e(ExprKind::Index { target: Box::new(arbitrary_expr(rng, d)), index: Box::new(arbitrary_expr(rng, d)) }),
        _ => arbitrary_call(rng, d),
    }
}

fn arbitrary_call(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let name = if rng.gen_bool(0.7) { BUILTINS.choose(rng).unwrap().name.to_owned() } else { ident(rng) };
    e(ExprKind::Call { name, args: (0..rng.gen_range(0..4)).map(|_| arbitrary_expr(rng, depth)).collect() })
}

fn arbitrary_body(rng: &mut ChaCha8Rng, depth: u32, min: usize) -> Vec<Stmt> {
    (0..rng.gen_range(min..4)).map(|_| arbitrary_stmt(rng, depth)).collect()
}

pub fn arbitrary_stmt(rng: &mut ChaCha8Rng, depth: u32) -> Stmt {
    let simple = depth == 0 || rng.gen_bool(0.5);
    if simple {
        return match rng.gen_range(0..4) {
            0 => s(StmtKind::Let { name: ident(rng), value: arbitrary_expr(rng, 3) }),
            1 => s(StmtKind::Assign { name: ident(rng), value: arbitrary_expr(rng, 3) }),
            2 => s(StmtKind::Call(arbitrary_call(rng, 2))),
            _ => s(StmtKind::Return(rng.gen_bool(0.5).then(|| arbitrary_expr(rng, 2)))),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => {
            let else_body = match rng.gen_range(0..3) {
                0 => None,
                // `else if` chain
                1 => Some(vec![arbitrary_if(rng, d)]),
                _ => Some(arbitrary_body(rng, d, 0)),
            };
            s(StmtKind::If { cond: arbitrary_expr(rng, 2), then_body: arbitrary_body(rng, d, 0), else_body })
        }
        1 => s(StmtKind::While { cond: arbitrary_expr(rng, 2), body: arbitrary_body(rng, d, 1) }),
        _ => s(StmtKind::ForEach { var: ident(rng), iter: arbitrary_expr(rng, 2), body: arbitrary_body(rng, d, 1) }),
    }
}

fn arbitrary_if(rng: &mut ChaCha8Rng, depth: u32) -> Stmt {
    s(StmtKind::If { cond: arbitrary_expr(rng, 2), then_body: arbitrary_body(rng, depth, 1), else_body: None })
}

pub fn arbitrary_program(seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..8);
    Program::from_statements((0..n).map(|_| arbitrary_stmt(&mut rng, 3)).collect())
}

// ---------------------------------------------------------------------------
// Plausible robot programs, for execution fuzzing. Mostly well-typed, with
// deliberate hazards: unknown labels, out-of-range indexes, division by
// zero, long waits, unbounded loops.

const LABELS: &[&str] = &["chair", "person", "apple", "donut", "refrigerator", "oven", "microwave", "sofa"];

struct Plausible {
    rng: ChaCha8Rng,
    nums: Vec<String>,
    lists: Vec<String>,
    fids: Vec<String>,
    next: usize,
    out: String,
}

impl Plausible {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn label(&mut self) -> &'static str {
        LABELS.choose(&mut self.rng).unwrap()
    }

    fn num(&mut self, depth: u32) -> String {
        let choice = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..9) };
        match choice {
            0 => format!("{}", self.rng.gen_range(0..20)),
            1 if !self.nums.is_empty() => self.nums.choose(&mut self.rng).unwrap().clone(),
            2 if !self.lists.is_empty() => format!("len({})", self.lists.choose(&mut self.rng).unwrap()),
            3 if !self.fids.is_empty() => {
                format!("distance(robot_position(), position({}))", self.fids.choose(&mut self.rng).unwrap())
            }
            4 => format!("abs({})", self.num(depth - 1)),
            5 => format!("min({}, {})", self.num(depth - 1), self.num(depth - 1)),
            6 => format!("floor(sqrt({}))", self.num(depth - 1)),
            7 => {
                let op = ["+", "-", "*", "/"].choose(&mut self.rng).unwrap();
                format!("({} {op} {})", self.num(depth - 1), self.num(depth - 1))
            }
            _ => format!("{}.5", self.rng.gen_range(0..5)),
        }
    }

    fn cond(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => format!("{} < {}", self.num(1), self.num(1)),
            1 if !self.lists.is_empty() => format!("len({}) > 0", self.lists.choose(&mut self.rng).unwrap()),
            2 => format!("not ({} == {})", self.num(1), self.num(1)),
            _ => format!("{} >= {} and true", self.num(1), self.num(1)),
        }
    }

    fn line(&mut self, indent: usize, text: &str) {
        self.out.push_str(&"  ".repeat(indent));
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn stmt(&mut self, indent: usize, depth: u32) {
        match self.rng.gen_range(0..13) {
            0 => {
                let v = self.fresh("n");
                let value = self.num(2);
                self.line(indent, &format!("let {v} = {value}"));
                self.nums.push(v);
            }
            1 => {
                let v = self.fresh("l");
                let l = self.label();
                self.line(indent, &format!("let {v} = find(\"{l}\")"));
                self.lists.push(v);
            }
            2 => {
                let v = self.fresh("f");
                let l = self.label();
                let text = match (self.rng.gen_range(0..3), self.lists.choose(&mut self.rng).cloned()) {
                    (0, Some(list)) => format!("let {v} = {list}[{}]", self.rng.gen_range(0..3)),
                    _ => format!("let {v} = nearest(\"{l}\")"),
                };
                self.line(indent, &text);
                self.fids.push(v);
            }
            3 if !self.fids.is_empty() => {
                let f = self.fids.choose(&mut self.rng).unwrap().clone();
                self.line(indent, &format!("walk_to(position({f}))"));
            }
            4 if !self.fids.is_empty() => {
                let f = self.fids.choose(&mut self.rng).unwrap().clone();
                self.line(indent, &format!("nudge({f})"));
            }
            5 => {
                let n = self.num(1);
                self.line(indent, &format!("say(\"value \" + str({n}))"));
            }
            6 => self.line(indent, "wait_for_user(\"ready?\")"),
            7 if depth > 0 => {
                let c = self.cond();
                self.line(indent, &format!("if ({c}) {{"));
                self.block(indent + 1, depth - 1);
                self.line(indent, "} else {");
                self.block(indent + 1, depth - 1);
                self.line(indent, "}");
            }
            8 if depth > 0 && !self.lists.is_empty() => {
                let list = self.lists.choose(&mut self.rng).unwrap().clone();
                let var = self.fresh("it");
                self.line(indent, &format!("for {var} in {list} {{"));
                self.fids.push(var);
                self.block(indent + 1, depth - 1);
                self.fids.pop();
                self.line(indent, "}");
            }
            9 if depth > 0 => {
                let counter = self.fresh("c");
                let bound = self.rng.gen_range(0..6);
                self.line(indent, &format!("let {counter} = 0"));
                self.line(indent, &format!("while ({counter} < {bound}) {{"));
                self.line(indent + 1, &format!("{counter} = {counter} + 1"));
                self.block(indent + 1, depth - 1);
                self.line(indent, "}");
            }
            10 if depth > 0 && self.rng.gen_bool(0.3) => {
                // unbounded
                self.line(indent, "while (true) {");
                self.block(indent + 1, depth - 1);
                self.line(indent, "}");
            }
            11 if self.rng.gen_bool(0.2) => self.line(indent, "return"),
            12 if !self.nums.is_empty() => {
                let v = self.nums.choose(&mut self.rng).unwrap().clone();
                let value = self.num(2);
                self.line(indent, &format!("{v} = {value}"));
            }
            _ => {
                let n = self.num(1);
                self.line(indent, &format!("say(str({n}))"));
            }
        }
    }

    fn block(&mut self, indent: usize, depth: u32) {
        let (nums, lists, fids) = (self.nums.len(), self.lists.len(), self.fids.len());
        for _ in 0..self.rng.gen_range(1..4) {
            self.stmt(indent, depth);
        }
        self.nums.truncate(nums);
        self.lists.truncate(lists);
        self.fids.truncate(fids);
    }
}

/// Source text of a plausible robot program.
pub fn plausible_program(seed: u64) -> String {
    let mut g = Plausible {
        rng: ChaCha8Rng::seed_from_u64(seed),
        nums: Vec::new(),
        lists: Vec::new(),
        fids: Vec::new(),
        next: 0,
        out: String::new(),
    };
    for _ in 0..g.rng.gen_range(1..10) {
        g.stmt(0, 3);
    }
    g.out
}

/// A program that never leaves a loop and never acts on the world.
pub fn pure_infinite_loop(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cond = ["true", "1 < 2", "not false", "x == x", "x < x + 1 or true"].choose(&mut rng).unwrap();
    let mut body = vec!["x = x + 1".to_owned()];
    for _ in 0..rng.gen_range(0..4) {
        body.push(
            match rng.gen_range(0..4) {
                0 => "let z = x * 2",
                1 => "if (x > 10) { y = y + 1 } else { y = y - 1 }",
                2 => "for c in find(\"chair\") { y = y + len(find(\"chair\")) }",
                _ => "let w = [x, y, \"s\"][2]",
            }
            .to_owned(),
        );
    }
    body.shuffle(&mut rng);
    format!("let x = 0\nlet y = 1\nwhile ({cond}) {{\n  {}\n}}\n", body.join("\n  "))
}

/// Random byte soup biased toward the language's tokens.
pub fn token_soup(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const PIECES: &[&str] = &[
        "let", "x", "=", "(", ")", "{", "}", "[", "]", ",", "if", "else", "while", "for", "in", "return", "\"", "1.5",
        "say", "walk_to", "+", "-", "*", "/", "<", "==", "and", "not", "\n", " ", ";", "#", "\\", "é", "1e999", ".",
    ];
    (0..rng.gen_range(0..40)).map(|_| *PIECES.choose(&mut rng).unwrap()).collect::<Vec<_>>().join("")
}
