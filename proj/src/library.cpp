#include "anisogup/library.hpp"

#include <mutex>

#include "anisogup/parser.hpp"

namespace anisogup {

namespace {

const char* kBaseline = R"(model "baseline" {
  dim 3
  scalaratom s1 = 1 + p[a]*p[a]
  f = 1
  ansatz "power-s1" power s1
})";

const char* kIsotropicRadial = R"(model "isotropic-radial" {
  dim 3
  radial fr
  radial gr
  radial lam
  scalaratom sfg = fr + gr*p[a]*p[a]
  f = fr
  g[i] = gr*p[i]
  ansatz "radial-c" explicit [j] : 2*p[j]*lam
  ansatz "reorder-compensator" explicit [j] : -2*p[j]*(fr1 + p[a]*p[a]*gr1 + 2*gr) / sfg
})";

const char* kIsotropicKempf = R"(model "isotropic-kempf" {
  dim 3
  tensor betaS rank 0 order 1
  tensor betaSp rank 0 order 1
  scalaratom skf = 1 + betaS*p[a]*p[a]
  f = 1 + betaS*p[a]*p[a]
  g[i] = betaSp*p[i]
  ansatz "power-skf" power skf
})";

const char* kFGeneral = R"(model "f-general" {
  dim 3
  tensor alpha rank 1 order 1
  tensor beta rank 2 symmetric order 1
  scalaratom sf = 1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b]
  scalaratom sa = 1 + alpha[a]*p[a]
  scalaratom sb = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b]
  ansatz "power-f" power sf
  ansatz "power-two" power sa sb
})";

const char* kFSingle = R"(model "f-single" {
  dim 3
  tensor fT rank 2 symmetric order 1
  scalaratom sf = 1 + p[a]*fT[a,b]*p[b]
  f = 1 + p[a]*fT[a,b]*p[b]
  ansatz "power-sf" power sf
})";

const char* kGSingle = R"(model "g-single" {
  dim 3
  tensor betap rank 2 symmetric order 1
  scalaratom sg = 1 + p[a]*betap[a,b]*p[b]
  f = 1
  g[i] = betap[i,a]*p[a]
  ansatz "power-sg" power sg
})";

const char* kAlphaAlphaPrime = R"(model "alpha-alphaprime" {
  dim 3
  tensor alpha rank 1 order 1
  tensor alphap rank 1 order 1
  scalaratom sa = 1 + alpha[a]*p[a]
  f = 1 + alpha[a]*p[a]
  g[i] = alphap[i]
  ansatz "paper-two-vector" explicit [j] : alpha[j] + alpha[j]*alpha[a]*p[a] - alphap[j]
})";

const char* kHConstantC = R"(model "h-constant-c" {
  dim 3
  tensor c rank 1 order 1
  scalaratom sc = 1 + p[a]*c[a]
  f = 1
  h[j] = c[j]
  ansatz "power-sc" power sc
  ansatz "poly-pc" poly 2 : p[a]*c[a] , (p[a]*c[a])^2
})";

const char* kHRank2D = R"(model "h-rank2-d" {
  dim 3
  tensor dmat rank 2 symmetric order 1
  scalaratom sd = 1 + p[a]*dmat[a,b]*p[b]
  f = 1
  h[j] = dmat[j,a]*p[a]
  ansatz "power-sd" power sd
  ansatz "poly-pd" poly 2 : p[a]*dmat[a,b]*p[b] , (p[a]*dmat[a,b]*p[b])^2
})";

const char* kKappaFG = R"(model "kappa-fg" {
  dim 3
  tensor fT rank 2 symmetric order 1
  scalaratom sf = 1 + p[a]*fT[a,b]*p[b]
  scalaratom skap = 1 + 2*p[a]*fT[a,b]*p[b]
  f = 1 + p[a]*fT[a,b]*p[b]
  g[i] = fT[i,a]*p[a]
  ansatz "power-sf" power sf
  ansatz "power-kappa" power skap
})";

const char* kKempfAniso = R"(model "kempf-aniso" {
  dim 3
  tensor beta rank 2 symmetric order 1
  scalaratom sf = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = 2*beta[i,a]*p[a]
  ansatz "power-sf" power sf
})";

const char* kKempfAnisoC = R"(model "kempf-aniso-c" {
  dim 3
  tensor beta rank 2 symmetric order 2
  tensor c rank 1 order 1
  scalaratom sf = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  h[j] = c[j]
  ansatz "paper-vi-b2" poly 2 : p[a]*beta[a,b]*p[b] , p[a]*c[a] , (p[a]*c[a])^2 , c[a]*c[a]*p[b]*p[b]
})";

const char* kCommutativeKempf = R"(model "commutative-kempf" {
  dim 3
  tensor beta rank 2 symmetric order 1
  scalaratom sden = 1 - p[a]*beta[a,b]*p[b]
  scalaratom sf = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = 2*sf*beta[i,a]*p[a] / sden
})";

const char* kCommutativeRadial = R"(model "commutative-radial" {
  dim 3
  radial fr
  scalaratom sden = fr - 2*p[a]*p[a]*fr1
  f = fr
  g[i] = 2*fr*fr1*p[i] / sden
})";

std::vector<ModelSpec> build() {
  const char* sources[] = {kBaseline,     kIsotropicRadial, kIsotropicKempf, kFGeneral,
                           kFSingle,      kGSingle,         kAlphaAlphaPrime, kHConstantC,
                           kHRank2D,      kKappaFG,         kKempfAniso,      kKempfAnisoC,
                           kCommutativeKempf, kCommutativeRadial};
  std::vector<ModelSpec> out;
  for (const char* s : sources) out.push_back(parse_model(s));
  return out;
}

}  // namespace

std::vector<ModelSpec> library() {
  static std::vector<ModelSpec> cache;
  static std::once_flag flag;
  std::call_once(flag, [] { cache = build(); });
  return cache;
}

const ModelSpec* find_model(const std::string& name) {
  static std::vector<ModelSpec> cache = library();
  for (const auto& m : cache)
    if (m.name == name) return &m;
  return nullptr;
}

}  // namespace anisogup
