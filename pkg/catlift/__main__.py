from catlift.main import main

main()
