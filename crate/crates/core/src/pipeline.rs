//! Document → spans → events, with the shared, immutable pieces bundled.

use crate::assemble::{assemble, TraffickingEvent};
use crate::config::HeuristicConfig;
use crate::corpus::ReportDocument;
use crate::lexicon::Lexicon;
use crate::measure::numeric_spans;
use crate::ruler::{annotate, compile, find_entities, CompiledMatcher, EntitySpan};

/// Compiled matcher plus assembly settings. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Pipeline {
    matcher: CompiledMatcher,
    config: HeuristicConfig,
}

impl Pipeline {
    pub fn new(lexicon: &Lexicon, config: HeuristicConfig) -> Self {
        Self {
            matcher: compile(lexicon),
            config,
        }
    }

    pub fn matcher(&self) -> &CompiledMatcher {
        &self.matcher
    }

    pub fn config(&self) -> &HeuristicConfig {
        &self.config
    }

    /// Gazetteer spans merged with number and weight spans.
    pub fn annotate(&self, doc: &ReportDocument) -> Vec<EntitySpan> {
        let lexical = find_entities(doc, &self.matcher);
        let numeric = doc
            .sentences
            .iter()
            .flat_map(|s| numeric_spans(s, &doc.raw_text))
            .collect();
        annotate(lexical, numeric)
    }

    pub fn extract(&self, doc: &ReportDocument) -> Vec<TraffickingEvent> {
        assemble(doc, &self.annotate(doc), &self.config)
    }
}
