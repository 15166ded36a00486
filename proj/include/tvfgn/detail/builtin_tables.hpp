#pragma once

// Generated by `tvfgn build-table --header`; refit with that verb rather than editing.

#include <string_view>

namespace tvfgn::detail {

inline constexpr std::string_view kBuiltinCascadeTableM3 = R"TBL(
# tvfgn AR(1) cascade coefficient table
version 1
m 3
h_min 0.5
h_step 0.01
knots 50
# H phi1 phi2 phi3 v1 v2 v3 objective
0.5 0.00010000099989990001 0.56913778815693861 0.94738300865032898 1 0 0 0.00010000600033325884
0.51000000000000001 0.0057088431822440123 0.56913778815693861 0.94738300865032898 0.98654138019718784 0.011693466893279434 0.0017651529095326583 0.00035096387735404302
0.52000000000000002 0.01152885460816907 0.57408313725482407 0.94764387961421281 0.97301287173655948 0.023230717838452149 0.0037564104249882954 0.00074933401136965581
0.53000000000000003 0.018880633003790094 0.64202920652134288 0.96426252982123084 0.9644110447109836 0.031219695457095058 0.0043692598319214591 0.0012271225536576811
0.54000000000000004 0.023889593352262945 0.60204076209806656 0.95738181681797263 0.94725271065671057 0.045338802230265818 0.0074084871130236157 0.0016925322601933986
0.55000000000000004 0.031818129655049328 0.64590956868529215 0.96370866069816152 0.93938589793686478 0.052015173405285602 0.0085989286578495843 0.0022429852717803112
0.56000000000000005 0.038630686019281976 0.65494862874923143 0.96660383958953133 0.92728430431754905 0.062164970312814087 0.010550725369636804 0.0028489313626746783
0.57000000000000006 0.045416745148515403 0.65895759966428513 0.96666158581893202 0.91453778799113472 0.072287822576890468 0.01317438943197482 0.0035190166062729895
0.57999999999999996 0.05269019617574093 0.67167153166845306 0.96981796740067394 0.90289377416792038 0.082046510157980257 0.015059715674099441 0.0042673213098154148
0.58999999999999997 0.059817439162418398 0.67751682535678148 0.97104514657332208 0.89018048881654499 0.091998397835629825 0.017821113347825258 0.0051000346631909395
0.59999999999999998 0.067299488842937849 0.68739219839617394 0.97315035127104887 0.87805875330268635 0.10170039608616634 0.020240850611147391 0.0060282947035740593
0.60999999999999999 0.074891203461791719 0.69634284326903961 0.97527086728853907 0.86569459058421472 0.1114390584542243 0.02286635096156087 0.0070561441465818745
0.62 0.084939569631604789 0.72572733021285285 0.97866121998789746 0.85966137237389217 0.1161195841293923 0.024219043496715546 0.0081876168411581015
0.63 0.092964953312070678 0.73345528030689378 0.98004538344447911 0.84728795467090356 0.12552862080117341 0.027183424527923005 0.0094020488432671415
0.64000000000000001 0.10931074176713396 0.76097059954589286 0.9832993153347338 0.8487092487858553 0.12298116832408348 0.028309582890061254 0.010746363251567326
0.65000000000000002 0.12074862503294032 0.78344702838797664 0.98570907890115333 0.84249496779135324 0.12775424637444358 0.029750785834203323 0.012099758010624056
0.66000000000000003 0.12939273655720832 0.79064275134008677 0.98702324593289004 0.82982374267696635 0.13754185701179866 0.032634400311234886 0.01355272029401829
0.67000000000000004 0.1379933742613263 0.79679908241259623 0.98816719336946679 0.81652073858733287 0.1474960721106722 0.035983189301994969 0.015155093863216835
0.67999999999999994 0.14967441601493314 0.81510430890623786 0.98990924887842902 0.80895255331509841 0.15316031771423802 0.03788712897066366 0.016896254138735495
0.68999999999999995 0.15847517448917706 0.82020965599158357 0.99072956756120756 0.79490138055813697 0.16319235586395434 0.041906263577908706 0.018745843099035424
0.69999999999999996 0.16759514509021961 0.82687359270514937 0.99174961756500379 0.78095707832574035 0.17353910552981036 0.045503816144449385 0.02076432092472582
0.70999999999999996 0.1795414913951221 0.84237022104537718 0.99301250789749806 0.77193426147586464 0.18015396156478797 0.047911776959347285 0.022903062447495612
0.71999999999999997 0.18881957699585192 0.84787773663999932 0.99376538558421856 0.75699931088854 0.19067848398337059 0.05232220512808948 0.025162203669965199
0.72999999999999998 0.20067367614125114 0.8605475662103963 0.99469033124199957 0.74632300067716095 0.19796535783028921 0.055711641492549861 0.027562652057691994
0.73999999999999999 0.21010052949757738 0.86517458187423768 0.99523470975995532 0.7302836495142031 0.20852160672735354 0.061194743758443464 0.030022169716080408
0.75 0.21972507503642702 0.8703357316502649 0.99577872966918357 0.71393230014413966 0.21934581477948731 0.066721885076372903 0.032614465023691988
0.76000000000000001 0.24672174286741599 0.89260076295560453 0.99662512784407664 0.72123107847617174 0.20972252752508927 0.069046393998739158 0.035118040624464303
0.77000000000000002 0.258544402294687 0.89978211589223567 0.99700933892795796 0.70668401780060375 0.21779345867962563 0.07552252351977054 0.037472797563987192
0.78000000000000003 0.26839737031883482 0.90306669015198571 0.99730075711371868 0.68802736689942623 0.22843184610459291 0.083540786995980887 0.039820611008052814
0.79000000000000004 0.28026312189548103 0.90958045071314952 0.99761066727885228 0.67181672443881935 0.23668396186080284 0.091499313700377866 0.042203091864084483
0.80000000000000004 0.29016219273439825 0.91243011412358077 0.99782718812897875 0.6514855928798392 0.24681258437701539 0.10170182274314531 0.044584490068950038
0.81000000000000005 0.30186307856119904 0.91773066744159304 0.99804581471257048 0.63308652986034863 0.25433210959540881 0.11258136054424252 0.046931245762407925
0.82000000000000006 0.31357226317126408 0.92280363144917343 0.99824993513926652 0.61366917934092935 0.26184438173793101 0.12448643892113972 0.049250189025450357
0.83000000000000007 0.32357485002540914 0.92516650831706504 0.9984065160495903 0.59054645156557872 0.27040475774517103 0.13904879068925016 0.051473523317336414
0.84000000000000008 0.34956208200182942 0.93472563772883221 0.99861258732601033 0.58500116824066195 0.26261276192075661 0.15238606983858144 0.053319290267386882
0.85000000000000009 0.36111534541250256 0.93812436811783106 0.99874590128015406 0.56141743993860083 0.26829071152462786 0.17029184853677135 0.054913192105188503
0.85999999999999999 0.3726809255466208 0.94144563084236443 0.99887523505985509 0.53657045510142876 0.27330564264001095 0.19012390225856024 0.056304101109411628
0.87 0.38410608789516509 0.94437221514709757 0.99898902695958391 0.51016793820760309 0.27683100385269654 0.21300105793970026 0.057434494505203312
0.88 0.39554451009834724 0.94723156279975829 0.99909764119746203 0.48236077673285566 0.27911613530602153 0.23852308796112293 0.058238570889239269
0.89000000000000001 0.41965165122157616 0.95280000743549298 0.99921606188425804 0.4651576364444257 0.26922533002774357 0.26561703352783073 0.058600494397604237
0.90000000000000002 0.43098458031793357 0.95505487349789941 0.99930825697372716 0.43345335579577216 0.26812244905977672 0.29842419514445112 0.058200531459161535
0.91000000000000003 0.4422499255517835 0.95716962323338484 0.99939445330375565 0.39993776854069185 0.26442549372118229 0.3356367377381258 0.057237611152436037
0.91999999999999993 0.45345467017441848 0.95916360531287403 0.99947605837176001 0.36452645257605132 0.25765429929022482 0.37781924813372392 0.055606811683726061
0.92999999999999994 0.46459832594293293 0.9610412332301479 0.99955299428565869 0.32712032775366306 0.24720077578087246 0.42567889646546436 0.053187816503231088
0.93999999999999995 0.48770956056015052 0.96506722229472741 0.99963381010631502 0.29583954891303216 0.2259716763358299 0.47818877475113802 0.049673271920473716
0.94999999999999996 0.49866638294508908 0.96657705116263548 0.99970167965988388 0.25303358703195883 0.20700423038507468 0.53996218258296658 0.045062753305787503
0.95999999999999996 0.53885580611035677 0.97030861649644151 0.9997729589159392 0.21446202817304738 0.17749066705777367 0.6080473047691789 0.039108088017718007
0.96999999999999997 0.54867428952791342 0.97189118413144926 0.99983409901727638 0.16561548805563514 0.14668950648644966 0.68769500545791529 0.031735618357132359
0.97999999999999998 0.55748015091269509 0.97301788118642374 0.99989155653790529 0.11343145147139784 0.10782683374233451 0.77874171478626764 0.022918500189843156
0.98999999999999999 0.57852303973003327 0.97555758525978153 0.99994793877294608 0.059840692504951172 0.05846460952143414 0.88169469797361466 0.012383705313722576
)TBL";

inline constexpr std::string_view kBuiltinCascadeTableM4 = R"TBL(
# tvfgn AR(1) cascade coefficient table
version 1
m 4
h_min 0.5
h_step 0.01
knots 50
# H phi1 phi2 phi3 phi4 v1 v2 v3 v4 objective
0.5 0.00010000099989990001 0.47655308645873451 0.85687191869978929 0.98094362982482153 1 0 0 0 0.00010000600033325884
0.51000000000000001 0.0052206518270872795 0.47655308645873451 0.85687191869978929 0.98094362982482153 0.98427091541951683 0.012443561341907558 0.0026757650497314153 0.00060975818884419425 0.00012061038978291008
0.52000000000000002 0.010447652090836323 0.47417892468536693 0.86292571201073986 0.98486827720423464 0.96802072293760988 0.025038521591002637 0.0058088855653354414 0.0011318699060519808 0.00023583299593327772
0.53000000000000003 0.01695148722169253 0.54602972862872134 0.9173796726471467 0.99425938834437577 0.95722586575693114 0.035174355317034264 0.006803356336791795 0.00079642258924269909 0.00043832655898446484
0.54000000000000004 0.022470650342829582 0.5348820028715604 0.90945826558702847 0.99339536849193621 0.94127463113491627 0.047132325387559626 0.010242441331239071 0.0013506021462849603 0.00056658739051998637
0.55000000000000004 0.028395614024915472 0.53970429660673602 0.90900830615768191 0.99308584563236701 0.92652018796932611 0.058202847059983007 0.013312846976872968 0.0019641179938179364 0.0007177273637161255
0.56000000000000005 0.034869541677734255 0.55647969159943789 0.91355692505637132 0.99333408862590966 0.91351101914355759 0.06814865726631654 0.015797258234998481 0.0025430653551274753 0.0008974202944062032
0.57000000000000006 0.04141388256693615 0.56989120268650273 0.91943135699463685 0.99364092342599242 0.90017579806646897 0.078365564015192499 0.018282616444965948 0.0031760214733724621 0.0010990101878088424
0.57999999999999996 0.04775067268135328 0.57218358373576661 0.91765302719632746 0.99365567906497465 0.88530771085186299 0.088416109090361225 0.022191495836936873 0.0040846842208390232 0.001294367307341701
0.58999999999999997 0.054694119951868625 0.58549628184757019 0.92355293329754251 0.99451811746436358 0.87229521152536971 0.097883758333600829 0.025275281704555046 0.0045457484364744638 0.0015540857794169797
0.59999999999999998 0.061878095520954565 0.59831063610675828 0.92760655202323905 0.99478233983785302 0.85944797360958047 0.10697252111191821 0.028110529990477293 0.0054689752880240448 0.0018072099819322768
0.60999999999999999 0.070672621389566856 0.62101351878422373 0.92925615109869031 0.99491446990190391 0.85114321195924292 0.11088755863861811 0.031336093499442809 0.0066331359026961974 0.002077601817993064
0.62 0.076638772368485708 0.61791115704585242 0.93240034575449005 0.99540465193367744 0.83316830142089515 0.12365163966594968 0.035675237988084987 0.0075048209250702493 0.0023576492568303888
0.63 0.085472493492844248 0.63612620313987545 0.93495058371154571 0.99556381378717551 0.82361385349250249 0.12839228423637788 0.039137890459241362 0.0088559718118782563 0.0026468900924226293
0.64000000000000001 0.091436121290070463 0.63057884275370335 0.93546063558403147 0.99578036859473684 0.80449174073481122 0.14065261876348467 0.044454035596572197 0.010401604905132077 0.0029919322819702992
0.65000000000000002 0.10163188351226195 0.65960828917571146 0.94288175142680208 0.99636926645025203 0.79808422739442231 0.14455716961333784 0.046138446352797548 0.011220156639442362 0.0032760106345908909
0.66000000000000003 0.11027958329927751 0.67435864599873963 0.94780424514067541 0.99683485280269934 0.78612350424262789 0.15241279794430757 0.049211459943095011 0.012252237869969651 0.0036182056098656122
0.67000000000000004 0.11835877839091961 0.67981647824409464 0.94867600948219444 0.99693208731451466 0.77154958196308809 0.15986732915717269 0.054214904768275153 0.014368184111464176 0.0039636309895427439
0.67999999999999994 0.12670121814471147 0.68655207519586825 0.95031205748350689 0.99707277816830098 0.75711859309043339 0.16716686429354083 0.059101257632635344 0.016613284983390365 0.0043352015368931371
0.68999999999999995 0.13573211269265559 0.69827958948766744 0.95321192941807975 0.99733490826146831 0.74411078237223061 0.17415176600939991 0.063098881552131836 0.018638570066237679 0.0047090618795503679
0.69999999999999996 0.14717725764022996 0.72290148713936031 0.95898224042779623 0.99770250000201643 0.73690905639909132 0.17801206165612571 0.065003195213395412 0.020075686731387432 0.0051089762900475115
0.70999999999999996 0.15777373238014339 0.73025449260405406 0.95990785402994117 0.99781037749374113 0.72448056971789276 0.18170564298855912 0.070606951633418236 0.023206835660129738 0.0054638191967311192
0.71999999999999997 0.16691866914311532 0.73999152501990517 0.96242386087785425 0.99799208936905615 0.70982691844536627 0.18916229186063147 0.074940448259745968 0.026070341434256284 0.0058176874839695426
0.72999999999999998 0.17613209194683449 0.75036984482737279 0.96538256205645956 0.99816758055646437 0.69483233201700068 0.19719527834605191 0.078822463738061357 0.029149925898886223 0.0062031581688703338
0.73999999999999999 0.1853580238481348 0.75913408875093868 0.96751969267989335 0.99834012527235827 0.67911427755224418 0.20445301189276044 0.083785709783745208 0.032647000771250219 0.0066153359092381275
0.75 0.19642204287473483 0.76948886213757617 0.96893486152790409 0.9985038415136116 0.66610249597242954 0.20670749480256939 0.090714833142598969 0.036475176082402173 0.0070628505459271029
0.76000000000000001 0.20774742186318979 0.78360038255766384 0.97070591108637827 0.9985293249120909 0.65319674681687856 0.21150972772449589 0.092668294469702192 0.042625230988923249 0.0074480649599491609
0.77000000000000002 0.2192342918955823 0.79586996760736317 0.97288616431377584 0.99865031684115257 0.63951366990739034 0.21568482879949216 0.09679926588687715 0.048002235406240282 0.0079090495864480356
0.78000000000000003 0.22974610140621302 0.80333456349477572 0.97462137839688179 0.99878368493306358 0.62264931326748918 0.22101044051174243 0.10253358683518782 0.053806659385580713 0.0083780447817486045
0.79000000000000004 0.24019233154816583 0.80910051948982886 0.9757341118358146 0.99886789882489468 0.60467249004499435 0.22529237434141144 0.10872678678533067 0.061308348828263561 0.0088346387759140072
0.80000000000000004 0.25064274399344 0.81360157769914798 0.9763539915280548 0.99893057169643651 0.58573312631412622 0.22828532676123148 0.11556734745712305 0.070414199467519256 0.0092640474057605372
0.81000000000000005 0.26287515549648532 0.82398113849018106 0.97773266963527128 0.99901934959731864 0.56962508511989418 0.22995481939611154 0.12059601967919246 0.079824075804801858 0.0096885271640300349
0.82000000000000006 0.2733639025204001 0.82748729825116707 0.97857669789484225 0.9990957211469953 0.54877331395804829 0.23237800589136509 0.12799262101649897 0.090856059134087605 0.010037521751660542
0.83000000000000007 0.28524860380581096 0.83520122051361012 0.97971759310087325 0.99916770185153592 0.52973929538742714 0.23359341187885388 0.13329428571010157 0.10337300702361753 0.010318660580741544
0.84000000000000008 0.29738771904134176 0.8434596314464099 0.9809565308435011 0.99924269799511456 0.51006591154356795 0.23489247808501068 0.13772009400541985 0.11732151636600154 0.010581529094903931
0.85000000000000009 0.3106405851311228 0.85389846595570607 0.98234348482095413 0.99931572111423561 0.49120623535241387 0.23474732552113184 0.14097388488294338 0.13307255424351083 0.010834288607821672
0.85999999999999999 0.32328436505982244 0.86096944134492137 0.98324353453058067 0.99938147087768847 0.46978534446572823 0.23280752558988577 0.14596429404284247 0.15144283590154356 0.011106175889732259
0.87 0.33551737926954051 0.86703306922320145 0.98420717002148761 0.99944174772980832 0.44631906180915853 0.2315917671410162 0.14959704385187389 0.17249212719795148 0.01131391028738033
0.88 0.34725050300785021 0.86978910019531042 0.98450655435285417 0.99948998936570121 0.42056019209039797 0.22643807020106368 0.15511676193988008 0.19788497576865818 0.011428429662077893
0.89000000000000001 0.36095346966411268 0.8780880425584896 0.98558428636551088 0.99954886414520416 0.39663666088896349 0.221817995578583 0.15649956571715953 0.22504577781529389 0.011400244804115346
0.90000000000000002 0.37340865250669808 0.88214861666932609 0.9861476048558071 0.99959767630575047 0.36910924403352785 0.2148160209353247 0.15869453713958506 0.25738019789156236 0.011235403822033653
0.91000000000000003 0.38783626075742039 0.89062278536612782 0.9870720315504351 0.99964943692639918 0.34280208614845903 0.20672914815241239 0.15691824878352387 0.29355051691560463 0.011004947782585189
0.91999999999999993 0.40135726262530047 0.89608562923806745 0.98776697687376613 0.99969766612982225 0.31329108770792397 0.19632987300073226 0.15511835718258274 0.33526068210876109 0.010706846032644142
0.92999999999999994 0.4143765953775787 0.89967512863448906 0.98827044446405998 0.99974088425060359 0.28124990627548452 0.18315747802235396 0.15179285510459337 0.38379976059756815 0.010234244203059795
0.93999999999999995 0.42853177334178449 0.90513956958457709 0.98887090683523426 0.9997838074445573 0.24853263304376946 0.16750485816750316 0.14481618118346865 0.43914632760525879 0.0095311137322596339
0.94999999999999996 0.44284165359263578 0.91088448245081133 0.98950865714762026 0.99982437471352259 0.21377051671735692 0.14967662580718355 0.13374586507448893 0.5028069924009706 0.0086199014184476855
0.95999999999999996 0.45245813782560779 0.912855369918947 0.98986764538109451 0.99986234495854309 0.17413917582475705 0.1289469312550536 0.12038889238003408 0.57652500054015532 0.0074977703494491562
0.96999999999999997 0.46408556417783131 0.91627747803819126 0.99026693448614744 0.99989878466523907 0.13386553371253215 0.10366464622313307 0.10123186071195947 0.66123795935237528 0.0061049535828439075
0.97999999999999998 0.47301653085418849 0.91712523710272509 0.99041389295543114 0.99993274177640312 0.090664917786331761 0.073977047243623181 0.07607824607065107 0.75927978889939396 0.004413650191546708
0.98999999999999999 0.48640713439252192 0.92325429232403766 0.99125124665331277 0.99996810137040859 0.046793852566878701 0.040448813182301618 0.042241531090913546 0.87051580315990618 0.0023926569081942012
)TBL";

}  // namespace tvfgn::detail
