//! Tree-walking interpreter bound to a [`WorldState`].
//!
//! Every statement and expression node evaluated costs one step. When the
//! budget is spent the run stops with `StepLimitExceeded` and `steps_used`
//! equals `max_steps` exactly.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::builtins::lookup;
use super::printer::format_number;
use super::{parse, Program};
use crate::world::{Fiducial, Label, Point, WorldError, WorldEvent, WorldState};

/// Longest list a program may build.
pub const MAX_LIST_LEN: usize = 4096;
/// Longest string a program may build, in bytes.
pub const MAX_STRING_LEN: usize = 64 * 1024;
/// Deepest nesting of lists inside lists.
pub const MAX_LIST_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub max_steps: u64,
    /// Simulated seconds a program may consume.
    pub max_sim_time: f64,
    /// Longest single `wait_for_user`, in seconds.
    pub max_wait: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 100_000, max_sim_time: 600.0, max_wait: 60.0 }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<(), String> {
        // negated comparisons also reject NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if self.max_steps == 0 || !(self.max_sim_time > 0.0) || !(self.max_wait > 0.0) {
            return Err("limits must all be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecStatus {
    Success,
    ParseError,
    RuntimeError,
    StepLimitExceeded,
}

impl fmt::Display for ExecStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecStatus::Success => "success",
            ExecStatus::ParseError => "parse_error",
            ExecStatus::RuntimeError => "runtime_error",
            ExecStatus::StepLimitExceeded => "step_limit_exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    pub status: ExecStatus,
    pub error_detail: Option<String>,
    pub steps_used: u64,
    pub sim_time_elapsed: f64,
    pub action_trace: Vec<WorldEvent>,
}

impl ExecutionOutcome {
    pub fn is_success(&self) -> bool {
        self.status == ExecStatus::Success
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Str(Rc<str>),
    Bool(bool),
    List(Rc<ListValue>),
    Fiducial(Fiducial),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListValue {
    pub items: Vec<Value>,
    depth: usize,
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Str(_) => "string",
            Value::Bool(_) => "bool",
            Value::List(_) => "list",
            Value::Fiducial(_) => "fiducial",
        }
    }

    fn depth(&self) -> usize {
        match self {
            Value::List(l) => l.depth,
            _ => 0,
        }
    }

    /// Builds a list, enforcing the length and nesting caps.
    fn list(items: Vec<Value>) -> Result<Value, String> {
        if items.len() > MAX_LIST_LEN {
            return Err(format!("list longer than {MAX_LIST_LEN} items"));
        }
        let depth = 1 + items.iter().map(Value::depth).max().unwrap_or(0);
        if depth > MAX_LIST_DEPTH {
            return Err(format!("lists nested deeper than {MAX_LIST_DEPTH}"));
        }
        Ok(Value::List(Rc::new(ListValue { items, depth })))
    }

    fn point(p: Point) -> Value {
        Value::List(Rc::new(ListValue { items: vec![Value::Number(p.x), Value::Number(p.y)], depth: 1 }))
    }

    /// Renders into `out`, failing once `MAX_STRING_LEN` would be exceeded.
    fn render(&self, out: &mut String) -> Result<(), String> {
        if out.len() > MAX_STRING_LEN {
            return Err(format!("string longer than {MAX_STRING_LEN} bytes"));
        }
        match self {
            Value::Number(n) => out.push_str(&format_number(*n)),
            Value::Str(s) => out.push_str(s),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Fiducial(f) => out.push_str(&format!("{} {}", f.label, f.id)),
            Value::List(l) => {
                out.push('[');
                for (i, item) in l.items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.render(out)?;
                }
                out.push(']');
            }
        }
        if out.len() > MAX_STRING_LEN {
            return Err(format!("string longer than {MAX_STRING_LEN} bytes"));
        }
        Ok(())
    }
}

enum Halt {
    Runtime(String),
    StepLimit,
}

type Eval<T> = Result<T, Halt>;

fn runtime<T>(span: Span, msg: impl fmt::Display) -> Eval<T> {
    Err(Halt::Runtime(format!("{span}: {msg}")))
}

enum Flow {
    Normal,
    Return,
}

struct Interpreter<'w> {
    world: &'w mut WorldState,
    limits: Limits,
    steps: u64,
    start_clock: f64,
    scopes: Vec<HashMap<String, Value>>,
}

/// Parses and runs `source`; parse failures become a `ParseError` outcome.
pub fn run_source(source: &str, world: &mut WorldState, limits: Limits) -> ExecutionOutcome {
    match parse(source) {
        Ok(program) => execute(&program, world, limits),
        Err(e) => ExecutionOutcome {
            status: ExecStatus::ParseError,
            error_detail: Some(e.to_string()),
            steps_used: 0,
            sim_time_elapsed: 0.0,
            action_trace: Vec::new(),
        },
    }
}

pub fn execute(program: &Program, world: &mut WorldState, limits: Limits) -> ExecutionOutcome {
    world.set_max_wait(limits.max_wait);
    let start_clock = world.sim_clock();
    let first_event = world.events().len();
    let mut interp = Interpreter { world, limits, steps: 0, start_clock, scopes: vec![HashMap::new()] };
    let result = interp.block(&program.statements);
    let steps_used = interp.steps;
    let (status, error_detail) = match result {
        Ok(_) => (ExecStatus::Success, None),
        Err(Halt::Runtime(msg)) => (ExecStatus::RuntimeError, Some(msg)),
        Err(Halt::StepLimit) => {
            (ExecStatus::StepLimitExceeded, Some(format!("step limit of {} reached", limits.max_steps)))
        }
    };
    ExecutionOutcome {
        status,
        error_detail,
        steps_used,
        sim_time_elapsed: world.sim_clock() - start_clock,
        action_trace: world.events()[first_event..].to_vec(),
    }
}

impl Interpreter<'_> {
    fn tick(&mut self) -> Eval<()> {
        if self.steps >= self.limits.max_steps {
            return Err(Halt::StepLimit);
        }
        self.steps += 1;
        Ok(())
    }

    fn lookup_var(&self, name: &str) -> Option<&Value> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn block(&mut self, body: &[Stmt]) -> Eval<Flow> {
        for s in body {
            if let Flow::Return = self.stmt(s)? {
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Normal)
    }

    fn scoped_block(&mut self, body: &[Stmt], seed: Option<(&str, Value)>) -> Eval<Flow> {
        let mut scope = HashMap::new();
        if let Some((k, v)) = seed {
            scope.insert(k.to_owned(), v);
        }
        self.scopes.push(scope);
        let r = self.block(body);
        self.scopes.pop();
        r
    }

    fn truthy(&mut self, e: &Expr) -> Eval<bool> {
        match self.expr(e)? {
            Value::Bool(b) => Ok(b),
            other => runtime(e.span, format!("condition must be bool, got {}", other.type_name())),
        }
    }

    fn stmt(&mut self, stmt: &Stmt) -> Eval<Flow> {
        self.tick()?;
        match &stmt.kind {
            StmtKind::Let { name, value } => {
                let v = self.expr(value)?;
                self.scopes.last_mut().expect("scope").insert(name.clone(), v);
            }
            StmtKind::Assign { name, value } => {
                let v = self.expr(value)?;
                match self.scopes.iter_mut().rev().find_map(|s| s.get_mut(name)) {
                    Some(slot) => *slot = v,
                    None => return runtime(stmt.span, format!("assignment to unbound variable `{name}`")),
                }
            }
            StmtKind::If { cond, then_body, else_body } => {
                if self.truthy(cond)? {
                    return self.scoped_block(then_body, None);
                } else if let Some(e) = else_body {
                    return self.scoped_block(e, None);
                }
            }
            StmtKind::While { cond, body } => {
                while self.truthy(cond)? {
                    if let Flow::Return = self.scoped_block(body, None)? {
                        return Ok(Flow::Return);
                    }
                }
            }
            StmtKind::ForEach { var, iter, body } => {
                let list = match self.expr(iter)? {
                    Value::List(list) => list,
                    other => return runtime(iter.span, format!("cannot iterate over {}", other.type_name())),
                };
                for item in list.items.iter() {
                    if let Flow::Return = self.scoped_block(body, Some((var, item.clone())))? {
                        return Ok(Flow::Return);
                    }
                }
            }
            StmtKind::Call(e) => {
                self.expr(e)?;
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e)?;
                }
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Normal)
    }

    fn expr(&mut self, e: &Expr) -> Eval<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Literal(Literal::Number(n)) => Ok(Value::Number(*n)),
            ExprKind::Literal(Literal::Str(s)) => Ok(Value::Str(Rc::from(s.as_str()))),
            ExprKind::Literal(Literal::Bool(b)) => Ok(Value::Bool(*b)),
            ExprKind::Var(name) => match self.lookup_var(name) {
                Some(v) => Ok(v.clone()),
                None => runtime(e.span, format!("unbound variable `{name}`")),
            },
            ExprKind::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    out.push(self.expr(i)?);
                }
                Value::list(out).or_else(|m| runtime(e.span, m))
            }
            ExprKind::Index { target, index } => {
                let t = self.expr(target)?;
                let i = self.expr(index)?;
                let (Value::List(list), Value::Number(n)) = (&t, &i) else {
                    return runtime(e.span, format!("cannot index {} with {}", t.type_name(), i.type_name()));
                };
                let items = &list.items;
                if n.fract() != 0.0 || *n < 0.0 || *n >= items.len() as f64 {
                    return runtime(
                        e.span,
                        format!("index {} out of range for list of {}", format_number(*n), items.len()),
                    );
                }
                Ok(items[*n as usize].clone())
            }
            ExprKind::Unary { op, operand } => {
                let v = self.expr(operand)?;
                match (op, v) {
                    (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (UnaryOp::Neg, Value::Number(n)) => Ok(Value::Number(-n)),
                    (UnaryOp::Not, v) => runtime(e.span, format!("`not` expects bool, got {}", v.type_name())),
                    (UnaryOp::Neg, v) => runtime(e.span, format!("`-` expects number, got {}", v.type_name())),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => self.binary(e.span, *op, lhs, rhs),
            ExprKind::Call { name, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(a)?);
                }
                self.call(e.span, name, vals)
            }
        }
    }

    fn binary(&mut self, span: Span, op: BinaryOp, lhs: &Expr, rhs: &Expr) -> Eval<Value> {
        // `and` / `or` short-circuit
        if matches!(op, BinaryOp::And | BinaryOp::Or) {
            let l = self.truthy(lhs)?;
            if (op == BinaryOp::And && !l) || (op == BinaryOp::Or && l) {
                return Ok(Value::Bool(l));
            }
            return Ok(Value::Bool(self.truthy(rhs)?));
        }
        let l = self.expr(lhs)?;
        let r = self.expr(rhs)?;
        use BinaryOp::*;
        match (op, &l, &r) {
            (Add, Value::Number(a), Value::Number(b)) => Ok(Value::Number(a + b)),
            (Sub, Value::Number(a), Value::Number(b)) => Ok(Value::Number(a - b)),
            (Mul, Value::Number(a), Value::Number(b)) => Ok(Value::Number(a * b)),
            (Div, Value::Number(_), Value::Number(b)) if *b == 0.0 => runtime(span, "division by zero"),
            (Div, Value::Number(a), Value::Number(b)) => Ok(Value::Number(a / b)),
            (Add, Value::Str(a), Value::Str(b)) => {
                if a.len() + b.len() > MAX_STRING_LEN {
                    return runtime(span, format!("string longer than {MAX_STRING_LEN} bytes"));
                }
                Ok(Value::Str(Rc::from(format!("{a}{b}"))))
            }
            (Add, Value::List(a), Value::List(b)) => {
                if a.items.len() + b.items.len() > MAX_LIST_LEN {
                    return runtime(span, format!("list longer than {MAX_LIST_LEN} items"));
                }
                Value::list(a.items.iter().chain(b.items.iter()).cloned().collect()).or_else(|m| runtime(span, m))
            }
            (Lt | Gt | Le | Ge, Value::Number(a), Value::Number(b)) => Ok(Value::Bool(match op {
                Lt => a < b,
                Gt => a > b,
                Le => a <= b,
                _ => a >= b,
            })),
            (Lt | Gt | Le | Ge, Value::Str(a), Value::Str(b)) => Ok(Value::Bool(match op {
                Lt => a < b,
                Gt => a > b,
                Le => a <= b,
                _ => a >= b,
            })),
            (Eq | Ne, _, _) => {
                let same = match (&l, &r) {
                    (Value::Number(a), Value::Number(b)) => a == b,
                    (Value::Str(a), Value::Str(b)) => a == b,
                    (Value::Bool(a), Value::Bool(b)) => a == b,
                    (Value::Fiducial(a), Value::Fiducial(b)) => a.id == b.id,
                    _ => return runtime(span, format!("cannot compare {} with {}", l.type_name(), r.type_name())),
                };
                Ok(Value::Bool(if op == Eq { same } else { !same }))
            }
            _ => runtime(
                span,
                format!("operator `{}` not defined for {} and {}", op.symbol(), l.type_name(), r.type_name()),
            ),
        }
    }

    fn world_err<T>(span: Span, e: WorldError) -> Eval<T> {
        runtime(span, e)
    }

    fn check_time(&self, span: Span) -> Eval<()> {
        if self.world.sim_clock() - self.start_clock > self.limits.max_sim_time {
            return runtime(span, format!("simulated time budget of {} s exceeded", self.limits.max_sim_time));
        }
        Ok(())
    }

    fn as_point(span: Span, v: &Value) -> Eval<Point> {
        match v {
            Value::Fiducial(f) => Ok(f.position),
            Value::List(l) => match l.items.as_slice() {
                [Value::Number(x), Value::Number(y)] => Ok(Point::new(*x, *y)),
                _ => runtime(span, "expected a point [x, y]"),
            },
            other => runtime(span, format!("expected a point or fiducial, got {}", other.type_name())),
        }
    }

    fn as_fiducial(span: Span, v: &Value) -> Eval<Fiducial> {
        match v {
            Value::Fiducial(f) => Ok(*f),
            other => runtime(span, format!("expected a fiducial, got {}", other.type_name())),
        }
    }

    fn as_number(span: Span, v: &Value) -> Eval<f64> {
        match v {
            Value::Number(n) => Ok(*n),
            other => runtime(span, format!("expected a number, got {}", other.type_name())),
        }
    }

    fn as_label(span: Span, v: &Value) -> Eval<Label> {
        match v {
            Value::Str(s) => s.parse().or_else(|e: String| runtime(span, e)),
            other => runtime(span, format!("expected a label string, got {}", other.type_name())),
        }
    }

    fn as_text(span: Span, v: &Value) -> Eval<String> {
        let mut s = String::new();
        v.render(&mut s).or_else(|e| runtime(span, e))?;
        Ok(s)
    }

    fn call(&mut self, span: Span, name: &str, args: Vec<Value>) -> Eval<Value> {
        let Some(b) = lookup(name) else {
            return runtime(span, format!("unknown builtin `{name}`"));
        };
        if !b.arity.contains(&args.len()) {
            return runtime(span, format!("`{name}` called with {} argument(s)", args.len()));
        }
        let v = match (name, args.as_slice()) {
            ("fiducials", []) => {
                let items = self.world.visible_fiducials().into_iter().map(Value::Fiducial).collect();
                Value::list(items).or_else(|m| runtime(span, m))?
            }
            ("find", [l]) => {
                let label = Self::as_label(span, l)?;
                let items = self
                    .world
                    .visible_fiducials()
                    .into_iter()
                    .filter(|f| f.label == label)
                    .map(Value::Fiducial)
                    .collect();
                Value::list(items).or_else(|m| runtime(span, m))?
            }
            ("nearest", [l]) => {
                let label = Self::as_label(span, l)?;
                match self.world.nearest(label) {
                    Some(f) => Value::Fiducial(f),
                    None => return runtime(span, format!("no {label} is present")),
                }
            }
            ("position", [f]) => Value::point(Self::as_fiducial(span, f)?.position),
            ("label", [f]) => Value::Str(Rc::from(Self::as_fiducial(span, f)?.label.as_str())),
            ("id", [f]) => Value::Number(f64::from(Self::as_fiducial(span, f)?.id)),
            ("robot_position", []) => Value::point(self.world.robot().position),
            ("distance", [a, b]) => {
                let (a, b) = (Self::as_point(span, a)?, Self::as_point(span, b)?);
                Value::Number(crate::world::distance(a, b))
            }
            ("walk_to", rest) => {
                let target = match rest {
                    [t] => Self::as_point(span, t)?,
                    [x, y] => Point::new(Self::as_number(span, x)?, Self::as_number(span, y)?),
                    _ => unreachable!("arity checked"),
                };
                let r = self.world.walk_to(target).or_else(|e| Self::world_err(span, e))?;
                self.check_time(span)?;
                Value::Bool(r.ok)
            }
            ("nudge", [t]) => {
                let id = match t {
                    Value::Fiducial(f) => f.id,
                    Value::Number(n) if n.fract() == 0.0 && *n >= 0.0 && *n <= f64::from(u32::MAX) => *n as u32,
                    other => return runtime(span, format!("cannot nudge {}", other.type_name())),
                };
                let r = self.world.nudge(id).or_else(|e| Self::world_err(span, e))?;
                self.check_time(span)?;
                Value::Bool(r.ok)
            }
            ("say", [t]) => {
                let text = Self::as_text(span, t)?;
                let r = self.world.say(&text).or_else(|e| Self::world_err(span, e))?;
                self.check_time(span)?;
                Value::Bool(r.ok)
            }
            ("wait_for_user", [t]) => {
                let text = Self::as_text(span, t)?;
                let r = self.world.wait_for_user(&text);
                self.check_time(span)?;
                Value::Bool(r.ok)
            }
            ("len", [v]) => match v {
                Value::List(l) => Value::Number(l.items.len() as f64),
                Value::Str(s) => Value::Number(s.chars().count() as f64),
                other => return runtime(span, format!("len of {}", other.type_name())),
            },
            ("append", [l, v]) => match l {
                Value::List(l) => {
                    if l.items.len() >= MAX_LIST_LEN {
                        return runtime(span, format!("list longer than {MAX_LIST_LEN} items"));
                    }
                    let mut out = Vec::with_capacity(l.items.len() + 1);
                    out.extend(l.items.iter().cloned());
                    out.push(v.clone());
                    Value::list(out).or_else(|m| runtime(span, m))?
                }
                other => return runtime(span, format!("append to {}", other.type_name())),
            },
            ("str", [v]) => Value::Str(Rc::from(Self::as_text(span, v)?)),
            ("abs", [v]) => Value::Number(Self::as_number(span, v)?.abs()),
            ("sqrt", [v]) => {
                let n = Self::as_number(span, v)?;
                if n < 0.0 {
                    return runtime(span, "square root of a negative number");
                }
                Value::Number(n.sqrt())
            }
            ("floor", [v]) => Value::Number(Self::as_number(span, v)?.floor()),
            ("min", [a, b]) => Value::Number(Self::as_number(span, a)?.min(Self::as_number(span, b)?)),
            ("max", [a, b]) => Value::Number(Self::as_number(span, a)?.max(Self::as_number(span, b)?)),
            _ => return runtime(span, format!("`{name}` is not callable with these arguments")),
        };
        Ok(v)
    }
}
