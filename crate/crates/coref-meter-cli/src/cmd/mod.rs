pub mod auc;
pub mod classify;
pub mod consistency;
pub mod disagg;
pub mod gap;
pub mod pcr;
pub mod permtest;
pub mod plaus;
pub mod score;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    /// Sum the component counts over documents, then divide once.
    Micro,
    /// Average per-document scores (F1 is the mean of per-document F1s).
    Macro,
}

impl From<AggregationArg> for coref_meter::metrics::Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Micro => coref_meter::metrics::Aggregation::Micro,
            AggregationArg::Macro => coref_meter::metrics::Aggregation::Macro,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    /// The file's coreference column is reference annotation.
    Gold,
    /// The file's coreference column is system output.
    Pred,
}

impl From<SideArg> for coref_meter::corpus::PartitionSide {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Gold => coref_meter::corpus::PartitionSide::Gold,
            SideArg::Pred => coref_meter::corpus::PartitionSide::Predicted,
        }
    }
}
