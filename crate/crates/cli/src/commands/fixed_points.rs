//! `fixed-points`: stationary points, their stability, g_c and the order parameter.

use dicke_dyn::equilibria::{fixed_points, order_parameter, FixedPointKind, Stability};
use dicke_dyn::{critical_coupling, ModelParams, PhaseState};
use serde::{Deserialize, Serialize};

use super::{to_value, Context};
use crate::error::CliResult;
use crate::output::{json_bytes, FileEntry, FileKind, Format, Table, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    pub model: ModelParams,
    /// `null` when ε = 0 and the threshold is infinite.
    pub g_c: Option<f64>,
    pub order_parameter: f64,
    pub fixed_points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub kind: FixedPointKind,
    pub stability: Stability,
    pub gamma: f64,
    pub curvature: f64,
    pub state: PhaseState,
}

pub const COLUMNS: [&str; 9] = ["kind", "stability", "gamma", "curvature", "Sx", "Sy", "Sz", "p", "q"];

pub fn document(params: &ModelParams) -> Document {
    let gc = critical_coupling(params);
    Document {
        schema_version: SCHEMA_VERSION,
        model: *params,
        g_c: gc.is_finite().then_some(gc),
        order_parameter: order_parameter(params),
        fixed_points: fixed_points(params)
            .into_iter()
            .map(|fp| PointRecord {
                kind: fp.kind,
                stability: fp.stability,
                gamma: fp.gamma,
                curvature: fp.curvature,
                state: fp.state,
            })
            .collect(),
    }
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let params = ctx.config.model.params()?;
    let doc = document(&params);
    let name = match ctx.format_or(Format::Json) {
        Format::Json => {
            ctx.out.write("fixed_points.json", &json_bytes(&doc)?)?;
            "fixed_points.json".to_string()
        }
        Format::Csv => {
            let mut table = Table::new(&COLUMNS);
            for fp in &doc.fixed_points {
                let s = fp.state;
                table.push(vec![
                    fp.kind.as_str().into(),
                    fp.stability.as_str().into(),
                    fp.gamma.into(),
                    fp.curvature.into(),
                    s.sx.into(),
                    s.sy.into(),
                    s.sz.into(),
                    s.p.into(),
                    s.q.into(),
                ]);
            }
            ctx.out.table("fixed_points", &table, Format::Csv)?
        }
    };
    let settings = serde_json::json!({ "g_c": to_value(&doc.g_c)?, "order_parameter": doc.order_parameter });
    ctx.finish("fixed-points", params, settings, vec![FileEntry::new(name, FileKind::FixedPoints, params)])
}
