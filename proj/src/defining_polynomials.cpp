// Bundled defining polynomials for F_{p^f}, f >= 2, p^f <= 2^20.
// Each entry is the lexicographically least monic primitive polynomial of
// degree f over F_p, coefficients listed from x^0 up to x^{f-1} (the
// leading 1 is implicit). Ordering key: (c_{f-1}, ..., c_0) ascending.
#include "maninlab/finite_field.hpp"

namespace maninlab {

const std::vector<DefiningPolynomial>& defining_polynomial_table() {
  static const std::vector<DefiningPolynomial> table = {
    {2, 2, {1, 1}},
    {3, 2, {2, 1}},
    {5, 2, {2, 1}},
    {7, 2, {3, 1}},
    {11, 2, {7, 1}},
    {13, 2, {2, 1}},
    {17, 2, {3, 1}},
    {19, 2, {2, 1}},
    {23, 2, {7, 1}},
    {29, 2, {3, 1}},
    {31, 2, {12, 1}},
    {37, 2, {5, 1}},
    {41, 2, {12, 1}},
    {43, 2, {3, 1}},
    {47, 2, {13, 1}},
    {53, 2, {5, 1}},
    {59, 2, {2, 1}},
    {61, 2, {2, 1}},
    {67, 2, {12, 1}},
    {71, 2, {11, 1}},
    {73, 2, {11, 1}},
    {79, 2, {3, 1}},
    {83, 2, {2, 1}},
    {89, 2, {6, 1}},
    {97, 2, {5, 1}},
    {101, 2, {3, 1}},
    {103, 2, {5, 1}},
    {107, 2, {5, 1}},
    {109, 2, {6, 1}},
    {113, 2, {10, 1}},
    {127, 2, {3, 1}},
    {131, 2, {14, 1}},
    {137, 2, {6, 1}},
    {139, 2, {2, 1}},
    {149, 2, {3, 1}},
    {151, 2, {12, 1}},
    {157, 2, {6, 1}},
    {163, 2, {11, 1}},
    {167, 2, {5, 1}},
    {173, 2, {5, 1}},
    {179, 2, {7, 1}},
    {181, 2, {18, 1}},
    {191, 2, {19, 1}},
    {193, 2, {5, 1}},
    {197, 2, {3, 1}},
    {199, 2, {6, 1}},
    {211, 2, {3, 1}},
    {223, 2, {5, 1}},
    {227, 2, {5, 1}},
    {229, 2, {6, 1}},
    {233, 2, {3, 1}},
    {239, 2, {13, 1}},
    {241, 2, {13, 1}},
    {251, 2, {19, 1}},
    {257, 2, {5, 1}},
    {263, 2, {7, 1}},
    {269, 2, {2, 1}},
    {271, 2, {21, 1}},
    {277, 2, {11, 1}},
    {281, 2, {3, 1}},
    {283, 2, {3, 1}},
    {293, 2, {2, 1}},
    {307, 2, {5, 1}},
    {311, 2, {17, 1}},
    {313, 2, {14, 1}},
    {317, 2, {5, 1}},
    {331, 2, {11, 1}},
    {337, 2, {15, 1}},
    {347, 2, {7, 1}},
    {349, 2, {2, 1}},
    {353, 2, {13, 1}},
    {359, 2, {7, 1}},
    {367, 2, {6, 1}},
    {373, 2, {6, 1}},
    {379, 2, {10, 1}},
    {383, 2, {5, 1}},
    {389, 2, {8, 1}},
    {397, 2, {13, 1}},
    {401, 2, {17, 1}},
    {409, 2, {22, 1}},
    {419, 2, {2, 1}},
    {421, 2, {18, 1}},
    {431, 2, {7, 1}},
    {433, 2, {5, 1}},
    {439, 2, {23, 1}},
    {443, 2, {7, 1}},
    {449, 2, {12, 1}},
    {457, 2, {15, 1}},
    {461, 2, {2, 1}},
    {463, 2, {11, 1}},
    {467, 2, {6, 1}},
    {479, 2, {34, 1}},
    {487, 2, {10, 1}},
    {491, 2, {8, 1}},
    {499, 2, {10, 1}},
    {503, 2, {19, 1}},
    {509, 2, {2, 1}},
    {521, 2, {6, 1}},
    {523, 2, {2, 1}},
    {541, 2, {10, 1}},
    {547, 2, {5, 1}},
    {557, 2, {8, 1}},
    {563, 2, {5, 1}},
    {569, 2, {3, 1}},
    {571, 2, {3, 1}},
    {577, 2, {10, 1}},
    {587, 2, {8, 1}},
    {593, 2, {3, 1}},
    {599, 2, {7, 1}},
    {601, 2, {11, 1}},
    {607, 2, {3, 1}},
    {613, 2, {6, 1}},
    {617, 2, {26, 1}},
    {619, 2, {2, 1}},
    {631, 2, {12, 1}},
    {641, 2, {6, 1}},
    {643, 2, {13, 1}},
    {647, 2, {10, 1}},
    {653, 2, {14, 1}},
    {659, 2, {10, 1}},
    {661, 2, {2, 1}},
    {673, 2, {5, 1}},
    {677, 2, {3, 1}},
    {683, 2, {5, 1}},
    {691, 2, {12, 1}},
    {701, 2, {3, 1}},
    {709, 2, {10, 1}},
    {719, 2, {19, 1}},
    {727, 2, {31, 1}},
    {733, 2, {6, 1}},
    {739, 2, {22, 1}},
    {743, 2, {5, 1}},
    {751, 2, {12, 1}},
    {757, 2, {6, 1}},
    {761, 2, {7, 1}},
    {769, 2, {21, 1}},
    {773, 2, {2, 1}},
    {787, 2, {2, 1}},
    {797, 2, {8, 1}},
    {809, 2, {12, 1}},
    {811, 2, {10, 1}},
    {821, 2, {3, 1}},
    {823, 2, {14, 1}},
    {827, 2, {6, 1}},
    {829, 2, {2, 1}},
    {839, 2, {11, 1}},
    {853, 2, {2, 1}},
    {857, 2, {5, 1}},
    {859, 2, {2, 1}},
    {863, 2, {5, 1}},
    {877, 2, {5, 1}},
    {881, 2, {15, 1}},
    {883, 2, {28, 1}},
    {887, 2, {10, 1}},
    {907, 2, {5, 1}},
    {911, 2, {37, 1}},
    {919, 2, {15, 1}},
    {929, 2, {7, 1}},
    {937, 2, {11, 1}},
    {941, 2, {2, 1}},
    {947, 2, {19, 1}},
    {953, 2, {5, 1}},
    {967, 2, {28, 1}},
    {971, 2, {6, 1}},
    {977, 2, {6, 1}},
    {983, 2, {11, 1}},
    {991, 2, {11, 1}},
    {997, 2, {11, 1}},
    {1009, 2, {11, 1}},
    {1013, 2, {7, 1}},
    {1019, 2, {6, 1}},
    {1021, 2, {10, 1}},
    {2, 3, {1, 1, 0}},
    {3, 3, {1, 2, 0}},
    {5, 3, {2, 3, 0}},
    {7, 3, {2, 3, 0}},
    {11, 3, {4, 1, 0}},
    {13, 3, {6, 1, 0}},
    {17, 3, {3, 1, 0}},
    {19, 3, {4, 1, 0}},
    {23, 3, {3, 1, 0}},
    {29, 3, {11, 1, 0}},
    {31, 3, {14, 1, 0}},
    {37, 3, {13, 1, 0}},
    {41, 3, {6, 1, 0}},
    {43, 3, {14, 1, 0}},
    {47, 3, {4, 1, 0}},
    {53, 3, {5, 1, 0}},
    {59, 3, {3, 1, 0}},
    {61, 3, {17, 1, 0}},
    {67, 3, {6, 1, 0}},
    {71, 3, {8, 1, 0}},
    {73, 3, {13, 1, 0}},
    {79, 3, {9, 1, 0}},
    {83, 3, {7, 1, 0}},
    {89, 3, {19, 1, 0}},
    {97, 3, {7, 1, 0}},
    {101, 3, {3, 1, 0}},
    {2, 4, {1, 1, 0, 0}},
    {3, 4, {2, 1, 0, 0}},
    {5, 4, {2, 2, 1, 0}},
    {7, 4, {5, 3, 1, 0}},
    {11, 4, {2, 1, 0, 0}},
    {13, 4, {2, 1, 1, 0}},
    {17, 4, {11, 1, 0, 0}},
    {19, 4, {10, 2, 0, 0}},
    {23, 4, {11, 1, 0, 0}},
    {29, 4, {19, 1, 0, 0}},
    {31, 4, {17, 2, 0, 0}},
    {2, 5, {1, 0, 1, 0, 0}},
    {3, 5, {1, 2, 0, 0, 0}},
    {5, 5, {2, 4, 0, 0, 0}},
    {7, 5, {4, 1, 0, 0, 0}},
    {11, 5, {4, 1, 1, 0, 0}},
    {13, 5, {2, 4, 0, 0, 0}},
    {2, 6, {1, 1, 0, 0, 0, 0}},
    {3, 6, {2, 1, 0, 0, 0, 0}},
    {5, 6, {2, 1, 0, 0, 0, 0}},
    {7, 6, {5, 1, 3, 0, 0, 0}},
    {2, 7, {1, 1, 0, 0, 0, 0, 0}},
    {3, 7, {1, 2, 1, 0, 0, 0, 0}},
    {5, 7, {2, 3, 0, 0, 0, 0, 0}},
    {7, 7, {2, 6, 0, 0, 0, 0, 0}},
    {2, 8, {1, 0, 1, 1, 1, 0, 0, 0}},
    {3, 8, {2, 0, 0, 1, 0, 0, 0, 0}},
    {5, 8, {3, 2, 1, 0, 0, 0, 0, 0}},
    {2, 9, {1, 0, 0, 0, 1, 0, 0, 0, 0}},
    {3, 9, {1, 0, 1, 2, 0, 0, 0, 0, 0}},
    {2, 10, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0}},
    {3, 10, {2, 1, 0, 1, 0, 0, 0, 0, 0, 0}},
    {2, 11, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0}},
    {3, 11, {1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 12, {1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0}},
    {3, 12, {2, 2, 2, 1, 2, 0, 0, 0, 0, 0, 0, 0}},
    {2, 13, {1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 14, {1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 15, {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 16, {1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 17, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 18, {1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 19, {1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {2, 20, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
  };
  return table;
}

}  // namespace maninlab
