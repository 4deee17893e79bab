//! Problem files: JSON descriptions of an algebra, a TRO, a corner or a
//! direct sum.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use trolab_core::linalg::{ComplexMatrix, C64};
use trolab_core::star_algebra::{corner, make_star_algebra, Projection, StarAlgebra};
use trolab_core::tro::{direct_sum, make_tro, Tro};

/// `{"rows": h, "cols": k, "re": [[...]], "im": [[...]]}`; `im` may be omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).im).collect()).collect();
        let any_im = im.iter().flatten().any(|v| *v != 0.0);
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re,
            im: any_im.then_some(im),
        }
    }

    /// Checked conversion; `field` names the matrix in diagnostics.
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix> {
        let check = |part: &str, rows: &[Vec<f64>]| -> Result<()> {
            if rows.len() != self.rows {
                bail!("{field}.{part}: {} rows, expected {}", rows.len(), self.rows);
            }
            for (i, r) in rows.iter().enumerate() {
                if r.len() != self.cols {
                    bail!("{field}.{part}[{i}]: {} entries, expected {}", r.len(), self.cols);
                }
                if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                    bail!("{field}.{part}[{i}][{j}] is not finite");
                }
            }
            Ok(())
        };
        if self.rows == 0 || self.cols == 0 {
            bail!("{field}: empty {}x{} matrix", self.rows, self.cols);
        }
        check("re", &self.re)?;
        if let Some(im) = &self.im {
            check("im", im)?;
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Algebra,
    Tro,
    Corner,
    DirectSum,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Algebra => "algebra",
            Kind::Tro => "tro",
            Kind::Corner => "corner",
            Kind::DirectSum => "direct_sum",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitize: Option<bool>,
}

/// On-disk problem.
///
/// * `algebra`: the matrices (other than the projection) generate a
///   *-algebra; `projection` names an idempotent or projection in it.
/// * `tro`: the matrices generate a TRO.
/// * `corner`: as `algebra`, and the TRO is `p A (1 - p)`.
/// * `direct_sum`: matrices named `group.name` are grouped by `group`; each
///   group generates one summand, summands ordered by group name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub matrices: BTreeMap<String, MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<String>,
    #[serde(default)]
    pub options: Options,
}

/// Resolved settings after flags, file options and environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub unitize: bool,
}

/// Certified input objects.
#[derive(Clone, Debug)]
pub enum Input {
    Algebra {
        algebra: StarAlgebra,
        projection: Option<Projection>,
    },
    Tro(Tro),
    Corner {
        algebra: StarAlgebra,
        projection: Projection,
        tro: Tro,
    },
    DirectSum(Tro),
}

impl Input {
    pub fn algebra(&self) -> Option<&StarAlgebra> {
        match self {
            Input::Algebra { algebra, .. } | Input::Corner { algebra, .. } => Some(algebra),
            _ => None,
        }
    }

    pub fn projection(&self) -> Option<&Projection> {
        match self {
            Input::Algebra { projection, .. } => projection.as_ref(),
            Input::Corner { projection, .. } => Some(projection),
            _ => None,
        }
    }

    pub fn tro(&self) -> Option<&Tro> {
        match self {
            Input::Tro(x) | Input::DirectSum(x) | Input::Corner { tro: x, .. } => Some(x),
            Input::Algebra { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
    pub settings: Settings,
    pub input: Input,
}

/// Parse JSON text; serde reports line and column for malformed input.
pub fn parse_file(text: &str) -> Result<ProblemFile> {
    let file: ProblemFile = serde_json::from_str(text).context("malformed problem file")?;
    if file.matrices.is_empty() {
        bail!("matrices: empty matrix list");
    }
    if let Some(t) = file.options.tol {
        if !(t.is_finite() && t > 0.0) {
            bail!("options.tol: must be a positive number, got {t}");
        }
    }
    Ok(file)
}

/// Build and certify the objects a problem describes.
///
/// Precedence for the tolerance: `tol_flag`, then `options.tol`, then
/// `env_tol`, then the library default.
pub fn resolve(file: ProblemFile, tol_flag: Option<f64>, env_tol: Option<f64>, unitize_flag: Option<bool>) -> Result<Problem> {
    let tol = tol_flag
        .or(file.options.tol)
        .or(env_tol)
        .unwrap_or(trolab_core::DEFAULT_TOL);
    let unitize = unitize_flag.or(file.options.unitize).unwrap_or(true);
    let settings = Settings { tol, unitize };
    let mut named = Vec::with_capacity(file.matrices.len());
    for (name, m) in &file.matrices {
        named.push((name.clone(), m.to_matrix(&format!("matrices.{name}"))?));
    }
    let proj_name = file.projection.clone();
    if let Some(p) = &proj_name {
        if !file.matrices.contains_key(p) {
            bail!("projection: no matrix named {p:?}");
        }
        if matches!(file.kind, Kind::Tro | Kind::DirectSum) {
            bail!("projection: not used by kind {}", file.kind.as_str());
        }
    }
    let gens: Vec<ComplexMatrix> = named
        .iter()
        .filter(|(n, _)| Some(n) != proj_name.as_ref())
        .map(|(_, m)| m.clone())
        .collect();
    let proj_matrix = named.iter().find(|(n, _)| Some(n) == proj_name.as_ref()).map(|(_, m)| m.clone());

    let input = match file.kind {
        Kind::Algebra | Kind::Corner => {
            if gens.is_empty() {
                bail!("matrices: no generators besides the projection");
            }
            let algebra = make_star_algebra(&gens, tol).context("matrices: cannot build the *-algebra")?;
            let projection = match &proj_matrix {
                Some(p) => Some(
                    Projection::idempotent(p, &algebra, 1e3 * tol)
                        .with_context(|| format!("projection {:?}", proj_name.as_deref().unwrap_or_default()))?,
                ),
                None => None,
            };
            if file.kind == Kind::Algebra {
                Input::Algebra { algebra, projection }
            } else {
                let projection = projection.ok_or_else(|| anyhow!("projection: required for kind corner"))?;
                let q = projection.complement(&algebra).context("projection complement")?;
                let carrier = corner(&projection, &algebra, &q)?;
                let tro = Tro::from_subspace(carrier, tol).context("corner p A (1 - p)")?;
                Input::Corner {
                    algebra,
                    projection,
                    tro,
                }
            }
        }
        Kind::Tro => Input::Tro(make_tro(&gens, tol).context("matrices: cannot build the TRO")?),
        Kind::DirectSum => {
            let mut groups: BTreeMap<String, Vec<ComplexMatrix>> = BTreeMap::new();
            for (name, m) in &named {
                let (group, _) = name
                    .split_once('.')
                    .ok_or_else(|| anyhow!("matrices.{name}: direct_sum names must look like group.name"))?;
                groups.entry(group.to_string()).or_default().push(m.clone());
            }
            let parts = groups
                .iter()
                .map(|(g, ms)| make_tro(ms, tol).with_context(|| format!("summand {g}")))
                .collect::<Result<Vec<_>>>()?;
            Input::DirectSum(direct_sum(&parts)?)
        }
    };
    Ok(Problem {
        file,
        settings,
        input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const M2: &str = r#"{
        "kind": "algebra",
        "matrices": {
            "e11": {"rows": 2, "cols": 2, "re": [[1, 0], [0, 0]]},
            "e12": {"rows": 2, "cols": 2, "re": [[0, 1], [0, 0]]},
            "p": {"rows": 2, "cols": 2, "re": [[1, 0], [0, 0]]}
        },
        "projection": "p"
    }"#;

    #[test]
    fn parses_and_resolves() {
        let f = parse_file(M2).unwrap();
        let p = resolve(f, None, None, None).unwrap();
        assert_eq!(p.input.algebra().unwrap().dim(), 4);
        assert!(p.input.projection().unwrap().is_self_adjoint());
        assert_eq!(p.settings.tol, trolab_core::DEFAULT_TOL);
    }

    #[test]
    fn precedence_of_tolerances() {
        let mut f = parse_file(M2).unwrap();
        f.options.tol = Some(1e-8);
        assert_eq!(resolve(f.clone(), None, Some(1e-7), None).unwrap().settings.tol, 1e-8);
        assert_eq!(resolve(f.clone(), Some(1e-11), Some(1e-7), None).unwrap().settings.tol, 1e-11);
        f.options.tol = None;
        assert_eq!(resolve(f, None, Some(1e-7), None).unwrap().settings.tol, 1e-7);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"kind": "tro", "matrices": {"x": {"rows": 2, "cols": 1, "re": [[1]]}}}"#;
        let err = resolve(parse_file(bad).unwrap(), None, None, None).unwrap_err();
        assert!(format!("{err:#}").contains("matrices.x.re"), "{err:#}");
        let empty = r#"{"kind": "tro", "matrices": {}}"#;
        assert!(format!("{:#}", parse_file(empty).unwrap_err()).contains("empty matrix list"));
        let broken = "{\n\"kind\": \"tro\",\n\"matrices\": [\n";
        let msg = format!("{:#}", parse_file(broken).unwrap_err());
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64 - 0.5));
        let back = MatrixJson::from_matrix(&m).to_matrix("m").unwrap();
        assert_eq!(back, m);
    }
}
