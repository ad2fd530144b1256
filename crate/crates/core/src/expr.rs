//! Scalar-field expressions over the coordinates `{t, x, y, z}`.
//!
//! Expressions are parsed into an immutable tree, evaluated in `f64`, and
//! differentiated exactly by a symbolic tree transform. Grammar (EBNF):
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = atom , [ "^" , unary ] ;        (* exponent must be constant *)
//! atom    = number | ident | ident , "(" , expr , ")" | "(" , expr , ")" ;
//! ident   = coordinate | "sin" | "cos" | "exp" | "ln" | "sqrt" ;
//! number  = digits , [ "." , digits ] , [ ("e" | "E") , [ "+" | "-" ] , digits ] ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use std::fmt;

use thiserror::Error;

/// Names a coordinate may take.
pub const ALLOWED_COORDS: [&str; 4] = ["t", "x", "y", "z"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("invalid coordinate list: {0}")]
    Coordinates(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in {op}({node}): argument {argument}")]
    Domain {
        op: &'static str,
        node: String,
        argument: f64,
    },
    #[error("point has {found} coordinates, expression needs {expected}")]
    Arity { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree node. `Var` indexes the owning expression's coordinate list.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

/// A parsed scalar expression together with its ordered coordinate names.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    coords: Vec<String>,
}

fn validate_coords(coords: &[&str]) -> Result<Vec<String>, ParseError> {
    if coords.is_empty() {
        return Err(ParseError::Coordinates("no coordinates".into()));
    }
    let mut out: Vec<String> = Vec::with_capacity(coords.len());
    for c in coords {
        if !ALLOWED_COORDS.contains(c) {
            return Err(ParseError::Coordinates(format!(
                "'{c}' is not one of t, x, y, z"
            )));
        }
        if out.iter().any(|o| o == c) {
            return Err(ParseError::Coordinates(format!("duplicate coordinate '{c}'")));
        }
        out.push((*c).to_string());
    }
    Ok(out)
}

/// Parses `text` over the ordered coordinates `coords`.
pub fn parse(text: &str, coords: &[&str]) -> Result<Expr, ParseError> {
    let coords = validate_coords(coords)?;
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords: &coords,
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(Expr { root, coords })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            let exponent = self.unary()?;
            let value = const_value(&exponent).ok_or(ParseError::Syntax {
                offset: start,
                message: "exponent must be a constant".into(),
            })?;
            return Ok(Node::Pow(Box::new(base), value));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => self.identifier(),
            Some(ch) => Err(self.syntax(format!("unexpected '{}'", ch as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number".into()));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.syntax("malformed exponent in number".into()));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Node::Const)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number '{text}'"),
            })
    }

    fn identifier(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if let Some(func) = Func::from_name(name) {
            if self.peek() != Some(b'(') {
                return Err(self.syntax(format!("expected '(' after {name}")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.syntax("expected ')'".into()));
            }
            self.pos += 1;
            return Ok(Node::Call(func, Box::new(arg)));
        }
        match self.coords.iter().position(|c| c == name) {
            Some(i) => Ok(Node::Var(i)),
            None => Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}

fn const_value(node: &Node) -> Option<f64> {
    match node {
        Node::Const(c) => Some(*c),
        Node::Var(_) => None,
        Node::Neg(a) => const_value(a).map(|v| -v),
        Node::Add(a, b) => Some(const_value(a)? + const_value(b)?),
        Node::Sub(a, b) => Some(const_value(a)? - const_value(b)?),
        Node::Mul(a, b) => Some(const_value(a)? * const_value(b)?),
        Node::Div(a, b) => Some(const_value(a)? / const_value(b)?),
        Node::Pow(a, e) => Some(const_value(a)?.powf(*e)),
        Node::Call(f, a) => {
            let v = const_value(a)?;
            Some(match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
                Func::Ln => v.ln(),
                Func::Sqrt => v.sqrt(),
            })
        }
    }
}

// Smart constructors with light constant folding; keep derivative trees small.
fn add(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x + y),
        (Node::Const(z), _) if *z == 0.0 => b,
        (_, Node::Const(z)) if *z == 0.0 => a,
        _ => Node::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x - y),
        (_, Node::Const(z)) if *z == 0.0 => a,
        (Node::Const(z), _) if *z == 0.0 => neg(b),
        _ => Node::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x * y),
        (Node::Const(z), _) | (_, Node::Const(z)) if *z == 0.0 => Node::Const(0.0),
        (Node::Const(o), _) if *o == 1.0 => b,
        (_, Node::Const(o)) if *o == 1.0 => a,
        _ => Node::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Const(z), _) if *z == 0.0 => Node::Const(0.0),
        (_, Node::Const(o)) if *o == 1.0 => a,
        _ => Node::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(x) => Node::Const(-x),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn pow(a: Node, e: f64) -> Node {
    if e == 0.0 {
        Node::Const(1.0)
    } else if e == 1.0 {
        a
    } else {
        Node::Pow(Box::new(a), e)
    }
}

fn derive(node: &Node, var: usize) -> Node {
    match node {
        Node::Const(_) => Node::Const(0.0),
        Node::Var(i) => Node::Const(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(derive(a, var)),
        Node::Add(a, b) => add(derive(a, var), derive(b, var)),
        Node::Sub(a, b) => sub(derive(a, var), derive(b, var)),
        Node::Mul(a, b) => add(
            mul(derive(a, var), (**b).clone()),
            mul((**a).clone(), derive(b, var)),
        ),
        Node::Div(a, b) => {
            let da = derive(a, var);
            let db = derive(b, var);
            if matches!(db, Node::Const(z) if z == 0.0) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2.0),
                )
            }
        }
        Node::Pow(a, e) => mul(
            mul(Node::Const(*e), pow((**a).clone(), e - 1.0)),
            derive(a, var),
        ),
        Node::Call(f, a) => {
            let da = derive(a, var);
            let inner = (**a).clone();
            let outer = match f {
                Func::Sin => Node::Call(Func::Cos, Box::new(inner)),
                Func::Cos => neg(Node::Call(Func::Sin, Box::new(inner))),
                Func::Exp => Node::Call(Func::Exp, Box::new(inner)),
                Func::Ln => return div(da, inner),
                Func::Sqrt => {
                    return div(da, mul(Node::Const(2.0), Node::Call(Func::Sqrt, Box::new(inner))))
                }
            };
            mul(outer, da)
        }
    }
}

fn is_integer(e: f64) -> bool {
    e.fract() == 0.0 && e.abs() < f64::from(i32::MAX)
}

struct Printer<'a> {
    node: &'a Node,
    coords: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.node, self.coords)
    }
}

fn eval_node(node: &Node, point: &[f64], coords: &[String]) -> Result<f64, EvalError> {
    let domain = |op: &'static str, arg: &Node, argument: f64| EvalError::Domain {
        op,
        node: Printer { node: arg, coords }.to_string(),
        argument,
    };
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var(i) => point[*i],
        Node::Neg(a) => -eval_node(a, point, coords)?,
        Node::Add(a, b) => eval_node(a, point, coords)? + eval_node(b, point, coords)?,
        Node::Sub(a, b) => eval_node(a, point, coords)? - eval_node(b, point, coords)?,
        Node::Mul(a, b) => eval_node(a, point, coords)? * eval_node(b, point, coords)?,
        Node::Div(a, b) => {
            let num = eval_node(a, point, coords)?;
            let den = eval_node(b, point, coords)?;
            if den == 0.0 {
                return Err(domain("division", b, den));
            }
            num / den
        }
        Node::Pow(a, e) => {
            let base = eval_node(a, point, coords)?;
            if base == 0.0 && *e < 0.0 {
                return Err(domain("division", a, base));
            }
            if is_integer(*e) {
                base.powi(*e as i32)
            } else {
                if base < 0.0 {
                    return Err(domain("pow", a, base));
                }
                base.powf(*e)
            }
        }
        Node::Call(func, a) => {
            let v = eval_node(a, point, coords)?;
            match func {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(domain("ln", a, v));
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(domain("sqrt", a, v));
                    }
                    v.sqrt()
                }
            }
        }
    })
}

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => 5,
    }
}

fn write_operand(
    f: &mut fmt::Formatter<'_>,
    node: &Node,
    coords: &[String],
    paren: bool,
) -> fmt::Result {
    if paren {
        f.write_str("(")?;
        write_node(f, node, coords)?;
        f.write_str(")")
    } else {
        write_node(f, node, coords)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, coords: &[String]) -> fmt::Result {
    match node {
        Node::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
        Node::Const(c) => write!(f, "{c}"),
        Node::Var(i) => f.write_str(&coords[*i]),
        Node::Neg(a) => {
            f.write_str("-")?;
            write_operand(f, a, coords, precedence(a) < 3)
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let (p, sym) = match node {
                Node::Add(..) => (1, " + "),
                Node::Sub(..) => (1, " - "),
                Node::Mul(..) => (2, " * "),
                _ => (2, " / "),
            };
            write_operand(f, a, coords, precedence(a) < p)?;
            f.write_str(sym)?;
            write_operand(f, b, coords, precedence(b) <= p)
        }
        Node::Pow(a, e) => {
            write_operand(f, a, coords, precedence(a) <= 4)?;
            if *e < 0.0 {
                write!(f, "^(-{})", -e)
            } else {
                write!(f, "^{e}")
            }
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, coords)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.coords)
    }
}

impl Expr {
    /// Builds an expression from a tree. Variable indices must be in range.
    pub fn from_node(root: Node, coords: &[&str]) -> Result<Self, ParseError> {
        let coords = validate_coords(coords)?;
        fn max_var(n: &Node) -> Option<usize> {
            match n {
                Node::Const(_) => None,
                Node::Var(i) => Some(*i),
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => max_var(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    max_var(a).max(max_var(b))
                }
            }
        }
        if let Some(i) = max_var(&root) {
            if i >= coords.len() {
                return Err(ParseError::Coordinates(format!(
                    "variable index {i} out of range for {} coordinates",
                    coords.len()
                )));
            }
        }
        Ok(Self { root, coords })
    }

    pub fn constant(value: f64, coords: &[&str]) -> Result<Self, ParseError> {
        Self::from_node(Node::Const(value), coords)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if point.len() != self.coords.len() {
            return Err(EvalError::Arity {
                expected: self.coords.len(),
                found: point.len(),
            });
        }
        eval_node(&self.root, point, &self.coords)
    }

    /// Exact partial derivative with respect to coordinate index `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        assert!(var < self.coords.len(), "coordinate index {var} out of range");
        Expr {
            root: derive(&self.root, var),
            coords: self.coords.clone(),
        }
    }

    /// Partial derivative with respect to a named coordinate.
    pub fn derivative_by_name(&self, name: &str) -> Option<Expr> {
        self.coords
            .iter()
            .position(|c| c == name)
            .map(|i| self.derivative(i))
    }

    /// The gradient as one expression per coordinate.
    pub fn gradient(&self) -> OneForm {
        OneForm {
            coeffs: (0..self.arity()).map(|i| self.derivative(i)).collect(),
            coords: self.coords.clone(),
        }
    }

    /// `self · other`; both must share coordinates.
    pub fn times(&self, other: &Expr) -> Expr {
        assert_eq!(self.coords, other.coords, "coordinate mismatch");
        Expr {
            root: Node::Mul(Box::new(self.root.clone()), Box::new(other.root.clone())),
            coords: self.coords.clone(),
        }
    }

    /// `self / other`; both must share coordinates.
    pub fn over(&self, other: &Expr) -> Expr {
        assert_eq!(self.coords, other.coords, "coordinate mismatch");
        Expr {
            root: Node::Div(Box::new(self.root.clone()), Box::new(other.root.clone())),
            coords: self.coords.clone(),
        }
    }

    /// `self + other`; both must share coordinates.
    pub fn plus(&self, other: &Expr) -> Expr {
        assert_eq!(self.coords, other.coords, "coordinate mismatch");
        Expr {
            root: Node::Add(Box::new(self.root.clone()), Box::new(other.root.clone())),
            coords: self.coords.clone(),
        }
    }

    pub fn is_constant(&self) -> bool {
        const_value(&self.root).is_some()
    }
}

/// Exact gradient of `e` at `point`.
pub fn grad(e: &Expr, point: &[f64]) -> Result<Vec<f64>, EvalError> {
    (0..e.arity()).map(|i| e.derivative(i).eval(point)).collect()
}

/// Exact Hessian of `e` at `point`, `h[a][b] = ∂²e/∂x^a∂x^b`.
pub fn hessian(e: &Expr, point: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
    (0..e.arity())
        .map(|a| {
            let da = e.derivative(a);
            (0..e.arity()).map(|b| da.derivative(b).eval(point)).collect()
        })
        .collect()
}

/// Covariant 1-form `p_a dx^a`, one coefficient expression per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    coeffs: Vec<Expr>,
    coords: Vec<String>,
}

impl OneForm {
    pub fn new(coeffs: Vec<Expr>) -> Result<Self, ParseError> {
        let first = coeffs
            .first()
            .ok_or_else(|| ParseError::Coordinates("one-form needs coefficients".into()))?;
        let coords = first.coords.clone();
        if coeffs.len() != coords.len() {
            return Err(ParseError::Coordinates(format!(
                "{} coefficients for {} coordinates",
                coeffs.len(),
                coords.len()
            )));
        }
        if coeffs.iter().any(|c| c.coords != coords) {
            return Err(ParseError::Coordinates("coefficients disagree on coordinates".into()));
        }
        Ok(Self { coeffs, coords })
    }

    /// Parses comma-separated coefficients, e.g. `"-y, x, 1"`.
    ///
    /// Commas inside parentheses do not split.
    pub fn parse(text: &str, coords: &[&str]) -> Result<Self, ParseError> {
        let mut parts = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push((start, &text[start..i]));
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push((start, &text[start..]));
        let coeffs = parts
            .into_iter()
            .map(|(offset, piece)| {
                parse(piece, coords).map_err(|e| match e {
                    ParseError::Syntax { offset: o, message } => ParseError::Syntax {
                        offset: o + offset,
                        message,
                    },
                    ParseError::UnknownIdentifier { name, offset: o } => {
                        ParseError::UnknownIdentifier {
                            name,
                            offset: o + offset,
                        }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.coeffs.iter().map(|c| c.eval(point)).collect()
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: &Expr) -> OneForm {
        OneForm {
            coeffs: self.coeffs.iter().map(|c| factor.times(c)).collect(),
            coords: self.coords.clone(),
        }
    }

    /// Divides every coefficient by `factor`.
    pub fn divided(&self, factor: &Expr) -> OneForm {
        OneForm {
            coeffs: self.coeffs.iter().map(|c| c.over(factor)).collect(),
            coords: self.coords.clone(),
        }
    }

    /// Coefficientwise sum.
    pub fn plus(&self, other: &OneForm) -> OneForm {
        OneForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.plus(b))
                .collect(),
            coords: self.coords.clone(),
        }
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `J[a][b] = ∂p_a/∂x^b` at `point`.
pub fn jacobian(form: &OneForm, point: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
    form.coeffs
        .iter()
        .map(|c| grad(c, point))
        .collect()
}
