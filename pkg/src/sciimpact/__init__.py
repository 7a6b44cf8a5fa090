"""Citation-corpus analytics: h-index forecasting and paper-contribution prediction.

Subpackage map:

* :mod:`sciimpact.corpus` - flat-file ingestion, immutable store, snapshots
* :mod:`sciimpact.scholarmetrics` - h-indices, author/venue metrics, distributions
* :mod:`sciimpact.topicmodel` - Gibbs-sampled topic model and content factors
* :mod:`sciimpact.collabnet` - co-authorship graph, PageRank, social factors
* :mod:`sciimpact.factorlab` - factor vectors, labels, dataset construction
* :mod:`sciimpact.learners` - regressors, classifiers, correlation, IGR
* :mod:`sciimpact.evalkit` - repeated-split protocol, metrics, ablations
* :mod:`sciimpact.pipeline` - end-to-end orchestration and artifact bundles
* :mod:`sciimpact.synth` - seeded synthetic corpus generator
* :mod:`sciimpact.cli` / :mod:`sciimpact.service` - command line and HTTP front ends
"""

__version__ = "0.1.0"
