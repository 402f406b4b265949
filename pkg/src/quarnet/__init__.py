"""quarnet: SIR epidemics on networks with perfect-quarantine interventions.

Library layout:
  graph        -- Graph type, edge-list I/O, summary statistics, immunization
  netgen       -- synthetic generators and configuration-model sampling
  genfun       -- generating-function analytics (thresholds, outbreak sizes)
  simulate     -- event-driven SIR engine with quarantine policies
  experiments  -- sweep/grid/ablation/immunization experiment suites
  reporting    -- CSV + manifest + figure output
  cli          -- command-line interface
"""

__version__ = "0.1.0"
