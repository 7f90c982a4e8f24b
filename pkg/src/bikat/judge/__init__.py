from .core import (Counterexample, EnumRefused, ExprBitest, Judgment,
                   PairSpec, PostMap, RelSpec)
from .oracles import (JudgeResult, RouteDisagreement, check_adequacy,
                      check_allall, check_bsim, check_existsexists,
                      check_existsforall, check_fsim, check_incorrectness,
                      dispatch)
from .witness import (RelWitness, Witness, WitnessRefused, WitnessReport,
                      check_bvalid, check_fvalid, construct_bwitness,
                      construct_fwitness, term_image, term_preimage)
from .trikat import (TriRel, check_bsim_via_trikat, check_fsim_via_trikat,
                     tri_embed, tri_proj_left2, tricom)
