# Exact rational enumeration of the hiring model and its corrected variants.
# Produces the frozen expected values used by the C++ unit and acceptance tests.

import itertools
from fractions import Fraction as F
def hiring(q0=None,q1=None,fb=None):
    P={}
    for a,y,yh in itertools.product([0,1],repeat=3):
        pa=F(1,2); py1=[F(6,10),F(3,10)][a]; py=py1 if y else 1-py1
        pyh1=F(8,10) if y else F(1,10)
        if q0 is None:
            pyh=pyh1 if yh else 1-pyh1
            P[(a,y,yh)]=pa*py*pyh
        else:
            q=[q0,q1][a]
            for c in [0,1]:
                pc=q if c==0 else 1-q
                if c==1: p=pyh1
                else: p=fb[a]
                pyh=p if yh else 1-p
                P[(a,y,yh,c)]=P.get((a,y,yh,c),0)+pa*py*pc*pyh
    return P
def marg(P,idx):
    out={}
    for k,v in P.items():
        kk=tuple(k[i] for i in idx); out[kk]=out.get(kk,0)+v
    return out
def cigap(P,x,y,z):
    m=marg(P,z+[x,y]); mz=marg(P,z); best=0
    for zc,pz in mz.items():
        if pz==0: continue
        pxy={k[-2:]:v/pz for k,v in m.items() if k[:len(z)]==zc}
        px={};py={}
        for (a,b),v in pxy.items(): px[a]=px.get(a,0)+v; py[b]=py.get(b,0)+v
        for (a,b),v in pxy.items(): best=max(best,abs(v-px[a]*py[b]))
    return best
P=hiring()
print("P(yh=1)",float(sum(v for k,v in P.items() if k[2]==1)))
print("dp",float(cigap(P,2,0,[])),"eo",float(cigap(P,2,0,[1])),"pp",float(cigap(P,1,0,[2])),"cal",float(cigap(P,1,2,[])),"bias",float(cigap(P,0,1,[])))
print("pp exact",cigap(P,1,0,[2]))
P2=hiring(F(0),F(1),{0:F(1,2),1:F(6,10)})
print("corr q1=1 fb .6: dp",float(cigap(P2,2,0,[])),"eo",float(cigap(P2,2,0,[1])),"pp",float(cigap(P2,1,0,[2])))
P3=hiring(F(0),F(1,2),{0:F(1,2),1:F(1,2)})
def ppv(P,g):
    num=sum(v for k,v in P.items() if k[0]==g and k[1]==1 and k[2]==1); den=sum(v for k,v in P.items() if k[0]==g and k[2]==1); return num/den
print("asym",float(ppv(P3,0)),float(ppv(P3,1)))
for q in [0,F(1,4),F(1,2),F(3,4),1]:
    P4=hiring(F(0),q,{0:F(1,2),1:F(1,2)}); print("sweep",float(q),float(cigap(P4,2,0,[])),float(cigap(P4,2,0,[1])),float(cigap(P4,1,0,[2])))
