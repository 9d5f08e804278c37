i = 0
while i < 3:
    if i == 1:
        print(i)
    i = i + 1
print("Done")
