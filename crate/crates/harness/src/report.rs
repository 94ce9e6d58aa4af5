//! Serialized fronts and run reports.

use moco_core::model::{Assignment, MocoInstance, ObjVec, ParetoResult};
use moco_core::oracle::OracleResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocStats {
    pub sat_calls: u64,
    pub cores: u64,
    pub iterations: u64,
}

/// A front in the instance's original units. Contains no timing data, so
/// reruns with the same seed serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontDocument {
    pub engine: String,
    pub status: String,
    /// Constant added to each objective to get from the internal
    /// non-negative value to the reported one.
    pub offsets: Vec<i64>,
    /// Sorted lexicographically.
    pub img_front: Vec<Vec<i64>>,
    /// Witness of each `img_front` entry, `x1` first.
    pub arg_front: Vec<String>,
    pub stats: DocStats,
}

fn render_front(inst: &MocoInstance, img: &[ObjVec], arg: &[Assignment]) -> (Vec<Vec<i64>>, Vec<String>) {
    let mut pairs: Vec<(Vec<i64>, String)> = img
        .iter()
        .zip(arg)
        .map(|(y, x)| (inst.reported(y), x.to_string()))
        .collect();
    pairs.sort();
    pairs.into_iter().unzip()
}

impl FrontDocument {
    pub fn from_result(engine: &str, inst: &MocoInstance, res: &ParetoResult) -> Self {
        let (img_front, arg_front) = render_front(inst, &res.img_front, &res.arg_front);
        FrontDocument {
            engine: engine.to_string(),
            status: res.status.as_str().to_string(),
            offsets: inst.offsets(),
            img_front,
            arg_front,
            stats: DocStats {
                sat_calls: res.stats.sat_calls,
                cores: res.stats.cores,
                iterations: res.stats.iterations,
            },
        }
    }

    pub fn from_oracle(inst: &MocoInstance, res: &OracleResult) -> Self {
        let (img_front, arg_front) = render_front(inst, &res.img_front, &res.arg_front);
        FrontDocument {
            engine: "oracle".to_string(),
            status: "complete".to_string(),
            offsets: inst.offsets(),
            img_front,
            arg_front,
            stats: DocStats::default(),
        }
    }

    /// Front in internal units (offsets removed).
    pub fn internal_front(&self) -> Vec<ObjVec> {
        self.img_front
            .iter()
            .map(|y| {
                ObjVec::new(
                    y.iter()
                        .zip(&self.offsets)
                        .map(|(v, o)| (v - o).max(0) as u64)
                        .collect(),
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// One line of the `solve --stream` protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamLine {
    /// Archive snapshot after a change, internal units.
    Archive { t_us: u64, img_front: Vec<Vec<u64>> },
    Result { wall_us: u64, doc: FrontDocument },
}
