"""tab2img: render low-dimensional mixed-type tabular data as grayscale images.

The pipeline in one breath: ingest a CSV into a typed dataset, normalize every
feature into [0,1], optionally score features with an ensemble of ReliefF and
mRMR, append stochastic noisy copies of features until a near-square pixel grid
is filled, compute a mixed-type association distance matrix, assign features to
pixels by greedy rank-matching, and emit one PNG per sample plus a manifest
that maps every pixel back to the feature (and source feature) it encodes.
"""

__version__ = "0.1.0"
