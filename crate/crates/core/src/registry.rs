//! Named utility constructors: the CLI and file formats address
//! preferences as `name(p1,p2,...)` strings.
//!
//! Bundled families:
//! - `cobb-douglas(a1,...,an)`: u(x) = prod max(x_i, 0)^(a_i)
//! - `neg-quadratic(c1,...,cn)`: u(x) = -|x - c|^2
//! - `linear(g1,...,gn)`: u(x) = g . x
//! - `counterexample(x)`: the 1-D instability family -x t, |x| < 1/4
//! - `shifted-cobb-douglas(a1,...,an,s1,...,sn)`: Cobb-Douglas evaluated
//!   at x + s, which expresses labor-supply utilities like
//!   sqrt((1 + x1) x2)

use crate::foundations::{counterexample_utility, CounterexampleParam};
use crate::geometry::Point;
use crate::preference::Preference;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum RegistryError {
    #[error("cannot parse utility spec {0:?}; expected name(p1,p2,...)")]
    BadSyntax(String),
    #[error("unknown utility {0:?}")]
    UnknownName(String),
    #[error("bad parameters for {name}: {reason}")]
    BadParams { name: String, reason: String },
}

/// Parse `name(p1,...,pk)` into a preference oracle.
pub fn parse_utility(spec: &str) -> Result<Preference, RegistryError> {
    let spec = spec.trim();
    let open = spec
        .find('(')
        .ok_or_else(|| RegistryError::BadSyntax(spec.to_string()))?;
    if !spec.ends_with(')') {
        return Err(RegistryError::BadSyntax(spec.to_string()));
    }
    let name = spec[..open].trim().to_string();
    let body = &spec[open + 1..spec.len() - 1];
    let params: Vec<f64> = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| RegistryError::BadParams {
                name: name.clone(),
                reason: e.to_string(),
            })?
    };
    build(&name, &params)
}

fn build(name: &str, params: &[f64]) -> Result<Preference, RegistryError> {
    let need_some = |ok: bool, reason: &str| {
        if ok {
            Ok(())
        } else {
            Err(RegistryError::BadParams {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        }
    };
    match name {
        "cobb-douglas" => {
            need_some(!params.is_empty(), "needs at least one exponent")?;
            need_some(params.iter().all(|a| *a > 0.0), "exponents must be positive")?;
            let a = params.to_vec();
            Ok(Preference::from_utility(a.len(), move |x: &Point| {
                x.coords()
                    .iter()
                    .zip(&a)
                    .map(|(xi, ai)| xi.max(0.0).powf(*ai))
                    .product()
            }))
        }
        "shifted-cobb-douglas" => {
            need_some(
                !params.is_empty() && params.len().is_multiple_of(2),
                "needs exponents followed by an equal number of shifts",
            )?;
            let n = params.len() / 2;
            let a = params[..n].to_vec();
            need_some(a.iter().all(|ai| *ai > 0.0), "exponents must be positive")?;
            let shift = params[n..].to_vec();
            Ok(Preference::from_utility(n, move |x: &Point| {
                x.coords()
                    .iter()
                    .zip(&a)
                    .zip(&shift)
                    .map(|((xi, ai), si)| (xi + si).max(0.0).powf(*ai))
                    .product()
            }))
        }
        "neg-quadratic" => {
            need_some(!params.is_empty(), "needs a center")?;
            let c = params.to_vec();
            Ok(Preference::from_utility(c.len(), move |x: &Point| {
                -x.coords()
                    .iter()
                    .zip(&c)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum::<f64>()
            }))
        }
        "linear" => {
            need_some(!params.is_empty(), "needs gradient coefficients")?;
            let g = params.to_vec();
            Ok(Preference::from_utility(g.len(), move |x: &Point| {
                crate::geometry::dot(x.coords(), &g)
            }))
        }
        "counterexample" => {
            need_some(params.len() == 1, "takes exactly one parameter")?;
            let param =
                CounterexampleParam::new(params[0]).map_err(|e| RegistryError::BadParams {
                    name: name.to_string(),
                    reason: e.to_string(),
                })?;
            let f = counterexample_utility(param);
            Ok(Preference::from_utility(1, move |x: &Point| f(x.0[0])))
        }
        other => Err(RegistryError::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cobb_douglas() {
        let pref = parse_utility("cobb-douglas(0.5, 0.5)").unwrap();
        assert_eq!(pref.dimension(), 2);
        let quarter = Point(vec![0.25, 0.25]);
        let half = Point(vec![0.5, 0.5]);
        assert!(pref.prefers(&half, &quarter));
        assert!((pref.utility(&half).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shifted_cobb_douglas_expresses_labor_supply() {
        let pref = parse_utility("shifted-cobb-douglas(0.5,0.5,1,0)").unwrap();
        assert_eq!(pref.dimension(), 2);
        let x = Point(vec![-0.5, 0.5]);
        let expect = (0.5f64 * 0.5).sqrt();
        assert!((pref.utility(&x).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn counterexample_is_one_dimensional() {
        let pref = parse_utility("counterexample(0.1)").unwrap();
        assert_eq!(pref.dimension(), 1);
        assert!(pref.prefers(&Point(vec![0.0]), &Point(vec![1.0])));
        assert!(parse_utility("counterexample(0.3)").is_err());
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(matches!(
            parse_utility("cobb-douglas"),
            Err(RegistryError::BadSyntax(_))
        ));
        assert!(matches!(
            parse_utility("mystery(1,2)"),
            Err(RegistryError::UnknownName(_))
        ));
        assert!(matches!(
            parse_utility("linear(1,abc)"),
            Err(RegistryError::BadParams { .. })
        ));
        assert!(matches!(
            parse_utility("shifted-cobb-douglas(0.5,0.5,1)"),
            Err(RegistryError::BadParams { .. })
        ));
    }
}
