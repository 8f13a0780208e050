# -*- coding: utf-8 -*-

from __future__ import absolute_import

from salemlab.common import (__version__,
                             SalemLabError,
                             InvalidSpecError,
                             DomainError,
                             ResourceLimitError,
                             RegimeError,
                             ValidityError,
                             ArtifactError)

from salemlab.dyadic import (CantorSpec,
                             TreeFlowMeasure,
                             AtomicMeasure,
                             cantor_flow,
                             lebesgue_flow,
                             n_approximation)
from salemlab.walks import WalkPath, build_ladder, deficiency_proxy
from salemlab.spectral import (transform_grid,
                               moment_mc,
                               tail_mc,
                               decay_pipeline)
from salemlab.dimension import box_count, capacity_dim, salem_report
