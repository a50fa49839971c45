//! Sampled initial-data expressions in `x` (and `y`), with `L` and `pi` bound.

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, DefaultNumericTypes,
    EvalexprError, Function, HashMapContext, Node, Value,
};

/// A compiled scalar expression.
#[derive(Debug)]
pub struct Expr {
    source: String,
    tree: Node<DefaultNumericTypes>,
}

type Unary = fn(f64) -> f64;

const FUNCTIONS: [(&str, Unary); 9] = [
    ("sin", f64::sin),
    ("cos", f64::cos),
    ("tan", f64::tan),
    ("exp", f64::exp),
    ("ln", f64::ln),
    ("sqrt", f64::sqrt),
    ("abs", f64::abs),
    ("tanh", f64::tanh),
    ("cosh", f64::cosh),
];

fn context(x: f64, y: f64, l: f64) -> HashMapContext<DefaultNumericTypes> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    for (name, v) in [("x", x), ("y", y), ("L", l), ("pi", std::f64::consts::PI)] {
        ctx.set_value(name.into(), Value::from_float(v)).expect("fresh variable");
    }
    for (name, f) in FUNCTIONS {
        ctx.set_function(
            name.into(),
            Function::new(move |arg: &Value<DefaultNumericTypes>| Ok(Value::from_float(f(arg.as_number()?)))),
        )
        .expect("fresh function");
    }
    ctx
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self, String> {
        let tree = build_operator_tree::<DefaultNumericTypes>(source).map_err(|e| format!("`{source}`: {e}"))?;
        let e = Self { source: source.to_string(), tree };
        // probe once so unknown identifiers surface during validation
        e.eval(0.1, 0.2, 1.0)?;
        Ok(e)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64, y: f64, l: f64) -> Result<f64, String> {
        let v = self
            .tree
            .eval_number_with_context(&context(x, y, l))
            .map_err(|e: EvalexprError<DefaultNumericTypes>| format!("`{}`: {e}", self.source))?;
        Ok(v)
    }

    /// Samples on `points`, each `(x, y)`.
    pub fn sample(&self, points: impl Iterator<Item = (f64, f64)>, l: f64) -> Result<Vec<f64>, String> {
        points.map(|(x, y)| self.eval(x, y, l)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_functions_and_constants() {
        let e = Expr::parse("sin(2 * pi * x / L) + 0.5 * y").unwrap();
        let v = e.eval(0.25, 2.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(Expr::parse("foo(x)").is_err());
        assert!(Expr::parse("x +").is_err());
    }
}
